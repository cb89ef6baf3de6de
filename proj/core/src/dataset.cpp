#include "wgt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wgt/errors.hpp"

namespace wgt {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool known_provenance(const std::string& p) {
    return p == "fdfd" || p == "born-model" || p == "external";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void FrequencyDataset::sort() {
    std::stable_sort(records.begin(), records.end(),
                     [](const FrequencyRecord& a, const FrequencyRecord& b) {
                         if (a.mode != b.mode) return a.mode < b.mode;
                         return a.omega < b.omega;
                     });
}

void FrequencyDataset::validate() const {
    if (!known_provenance(provenance))
        throw validation_error("dataset: provenance must be fdfd, born-model, or external");
    const FrequencyRecord* prev = nullptr;
    for (const auto& r : records) {
        if (r.mode < 0) throw validation_error("dataset: negative mode index");
        if (!std::isfinite(r.omega) || !std::isfinite(r.k) ||
            !std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
            throw validation_error("dataset: non-finite record");
        if (!(r.omega > r.mode * kPi))
            throw validation_error("dataset: omega at or below the mode cutoff n*pi");
        if (prev && prev->mode == r.mode && !(r.omega > prev->omega))
            throw validation_error("dataset: omegas must be strictly increasing per mode");
        if (prev && r.mode < prev->mode)
            throw validation_error("dataset: records must be sorted by mode");
        prev = &r;
    }
}

std::vector<int> FrequencyDataset::modes() const {
    std::set<int> s;
    for (const auto& r : records) s.insert(r.mode);
    return {s.begin(), s.end()};
}

FrequencyDataset FrequencyDataset::select_mode(int n) const {
    FrequencyDataset out;
    out.provenance = provenance;
    for (const auto& r : records)
        if (r.mode == n) out.records.push_back(r);
    return out;
}

std::vector<double> FrequencyDataset::omegas(int mode) const {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.mode == mode) out.push_back(r.omega);
    return out;
}

std::vector<cdouble> FrequencyDataset::values(int mode) const {
    std::vector<cdouble> out;
    for (const auto& r : records)
        if (r.mode == mode) out.push_back(r.value);
    return out;
}

std::string to_json_string(const FrequencyDataset& d, int indent) {
    nlohmann::json j;
    j["provenance"] = d.provenance;
    j["records"] = nlohmann::json::array();
    for (const auto& r : d.records) {
        j["records"].push_back({{"mode", r.mode},
                                {"k", r.k},
                                {"omega", r.omega},
                                {"re", r.value.real()},
                                {"im", r.value.imag()}});
    }
    return j.dump(indent);
}

FrequencyDataset dataset_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("dataset: invalid JSON: ") + e.what());
    }
    FrequencyDataset d;
    try {
        d.provenance = j.at("provenance").get<std::string>();
        for (const auto& e : j.at("records")) {
            FrequencyRecord r;
            r.mode = e.at("mode").get<int>();
            r.k = e.at("k").get<double>();
            r.omega = e.at("omega").get<double>();
            r.value = cdouble(e.at("re").get<double>(), e.at("im").get<double>());
            d.records.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("dataset: missing or ill-typed field: ") + e.what());
    }
    d.validate();
    return d;
}

std::string to_csv_string(const FrequencyDataset& d) {
    std::ostringstream out;
    out << "# provenance: " << d.provenance << "\n";
    out << "mode,k,omega,re,im\n";
    for (const auto& r : d.records) {
        out << r.mode << ',' << format_double(r.k) << ',' << format_double(r.omega) << ','
            << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << "\n";
    }
    return out.str();
}

FrequencyDataset dataset_from_csv_string(const std::string& text) {
    FrequencyDataset d;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# provenance:", 0) == 0) {
            std::string p = line.substr(std::string("# provenance:").size());
            const auto b = p.find_first_not_of(" \t");
            d.provenance = (b == std::string::npos) ? "" : p.substr(b);
            continue;
        }
        if (line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("mode,", 0) != 0)
                throw validation_error("dataset CSV: missing header row 'mode,k,omega,re,im'");
            header_seen = true;
            continue;
        }
        FrequencyRecord r;
        double re = 0, im = 0;
        char c1, c2, c3, c4;
        std::istringstream row(line);
        if (!(row >> r.mode >> c1 >> r.k >> c2 >> r.omega >> c3 >> re >> c4 >> im) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw validation_error("dataset CSV: malformed row: " + line);
        r.value = cdouble(re, im);
        d.records.push_back(r);
    }
    if (!header_seen) throw validation_error("dataset CSV: no header row found");
    d.validate();
    return d;
}

void save_dataset(const FrequencyDataset& d, const std::string& path) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        write_text_file(path, to_json_string(d) + "\n");
    else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        write_text_file(path, to_csv_string(d));
    else
        throw validation_error("save_dataset: path must end in .json or .csv: " + path);
}

FrequencyDataset load_dataset(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        return dataset_from_json_string(text);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return dataset_from_csv_string(text);
    throw validation_error("load_dataset: path must end in .json or .csv: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw validation_error("failed writing file: " + path);
}

}  // namespace wgt
