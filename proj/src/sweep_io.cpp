#include "orthoshrink/sweep_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace orthoshrink {

namespace {

using nlohmann::json;

// Estimator labels may contain commas (custom:c1,...,cp), so the writer
// quotes them and the splitter understands double-quoted fields.
std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const auto r = rows.size();
    const auto c = r == 0 ? 0 : rows[0].size();
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < c; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

}  // namespace

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string sweep_csv_header(int p) {
    std::string header = "sweep_value,estimator,frobenius,frobenius_se";
    for (int k = 1; k <= p; ++k) header += ",eig" + std::to_string(k);
    for (int k = 1; k <= p; ++k) header += ",eig_se" + std::to_string(k);
    header += ",reps,seed,rejects";
    return header;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("write_sweep_csv: no rows");
    }
    const int p = static_cast<int>(rows.front().estimate.eigenvalues.size());
    out << sweep_csv_header(p) << '\n';
    for (const auto& row : rows) {
        const auto& e = row.estimate;
        out << csv_number(row.sweep_value) << ',' << csv_field(row.estimator) << ','
            << csv_number(e.frobenius) << ',' << csv_number(e.frobenius_se);
        for (int k = 0; k < p; ++k) out << ',' << csv_number(e.eigenvalues[k]);
        for (int k = 0; k < p; ++k) out << ',' << csv_number(e.eigenvalue_se[k]);
        out << ',' << e.reps << ',' << e.seed << ',' << e.rejects << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("read_sweep_csv: empty input");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 7 || header[0] != "sweep_value" || header[1] != "estimator") {
        throw std::runtime_error("read_sweep_csv: unexpected header");
    }
    const int p = static_cast<int>((header.size() - 7) / 2);
    if (sweep_csv_header(p) != line) {
        throw std::runtime_error("read_sweep_csv: header does not match schema");
    }

    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("read_sweep_csv: bad field count");
        }
        SweepRow row;
        size_t f = 0;
        row.sweep_value = std::stod(fields[f++]);
        row.estimator = fields[f++];
        row.estimate.frobenius = std::stod(fields[f++]);
        row.estimate.frobenius_se = std::stod(fields[f++]);
        row.estimate.eigenvalues.resize(p);
        for (int k = 0; k < p; ++k) row.estimate.eigenvalues[k] = std::stod(fields[f++]);
        row.estimate.eigenvalue_se.resize(p);
        for (int k = 0; k < p; ++k) row.estimate.eigenvalue_se[k] = std::stod(fields[f++]);
        row.estimate.reps = std::stol(fields[f++]);
        row.estimate.seed = std::stoull(fields[f++]);
        row.estimate.rejects = std::stol(fields[f++]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        const auto& e = row.estimate;
        arr.push_back(json{{"sweep_value", row.sweep_value},
                           {"estimator", row.estimator},
                           {"frobenius", e.frobenius},
                           {"frobenius_se", e.frobenius_se},
                           {"eigenvalues", vector_to_json(e.eigenvalues)},
                           {"eigenvalue_se", vector_to_json(e.eigenvalue_se)},
                           {"mean", matrix_to_json(e.mean)},
                           {"stderr", matrix_to_json(e.stderr_entries)},
                           {"reps", e.reps},
                           {"seed", e.seed},
                           {"rejects", e.rejects}});
    }
    out << arr.dump(2) << '\n';
}

std::vector<SweepRow> read_sweep_json(std::istream& in) {
    const json arr = json::parse(in);
    std::vector<SweepRow> rows;
    for (const auto& item : arr) {
        SweepRow row;
        row.sweep_value = item.at("sweep_value").get<double>();
        row.estimator = item.at("estimator").get<std::string>();
        auto& e = row.estimate;
        e.frobenius = item.at("frobenius").get<double>();
        e.frobenius_se = item.at("frobenius_se").get<double>();
        e.eigenvalues = vector_from_json(item.at("eigenvalues"));
        e.eigenvalue_se = vector_from_json(item.at("eigenvalue_se"));
        e.mean = matrix_from_json(item.at("mean"));
        e.stderr_entries = matrix_from_json(item.at("stderr"));
        e.reps = item.at("reps").get<long>();
        e.seed = item.at("seed").get<std::uint64_t>();
        e.rejects = item.at("rejects").get<long>();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string appendix_csv_header() {
    return "n,max_eig,max_eig_se,below_n,bound_ok,reps,seed,rejects";
}

void write_appendix_csv(std::ostream& out, const std::vector<AppendixRow>& rows) {
    out << appendix_csv_header() << '\n';
    for (const auto& row : rows) {
        out << row.n << ',' << csv_number(row.max_eigenvalue) << ','
            << csv_number(row.max_eigenvalue_se) << ',' << (row.below_n ? 1 : 0) << ','
            << (row.bound_ok ? 1 : 0) << ',' << row.reps << ',' << row.seed << ','
            << row.rejects << '\n';
    }
}

std::vector<AppendixRow> read_appendix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != appendix_csv_header()) {
        throw std::runtime_error("read_appendix_csv: unexpected header");
    }
    std::vector<AppendixRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) {
            throw std::runtime_error("read_appendix_csv: bad field count");
        }
        AppendixRow row;
        row.n = std::stoi(fields[0]);
        row.max_eigenvalue = std::stod(fields[1]);
        row.max_eigenvalue_se = std::stod(fields[2]);
        row.below_n = fields[3] == "1";
        row.bound_ok = fields[4] == "1";
        row.reps = std::stol(fields[5]);
        row.seed = std::stoull(fields[6]);
        row.rejects = std::stol(fields[7]);
        rows.push_back(row);
    }
    return rows;
}

void write_appendix_json(std::ostream& out, const std::vector<AppendixRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        arr.push_back(json{{"n", row.n},
                           {"max_eig", row.max_eigenvalue},
                           {"max_eig_se", row.max_eigenvalue_se},
                           {"below_n", row.below_n},
                           {"bound_ok", row.bound_ok},
                           {"reps", row.reps},
                           {"seed", row.seed},
                           {"rejects", row.rejects}});
    }
    out << arr.dump(2) << '\n';
}

std::vector<AppendixRow> read_appendix_json(std::istream& in) {
    const json arr = json::parse(in);
    std::vector<AppendixRow> rows;
    for (const auto& item : arr) {
        // NaN serializes to null (rows where the estimator is undefined).
        const auto as_double = [](const json& v) {
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        };
        AppendixRow row;
        row.n = item.at("n").get<int>();
        row.max_eigenvalue = as_double(item.at("max_eig"));
        row.max_eigenvalue_se = as_double(item.at("max_eig_se"));
        row.below_n = item.at("below_n").get<bool>();
        row.bound_ok = item.at("bound_ok").get<bool>();
        row.reps = item.at("reps").get<long>();
        row.seed = item.at("seed").get<std::uint64_t>();
        row.rejects = item.at("rejects").get<long>();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace orthoshrink
