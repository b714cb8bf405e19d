#include "fairpath/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fairpath/rng.hpp"

namespace fairpath {

std::string_view to_string(VariableKind kind) {
    return kind == VariableKind::Binary ? "binary" : "continuous";
}

VariableKind parse_kind(std::string_view text) {
    const auto key = normalize_name(text);
    if (key == "binary" || key == "b") return VariableKind::Binary;
    if (key == "continuous" || key == "c") return VariableKind::Continuous;
    throw std::invalid_argument("unknown variable kind '" + std::string(text) + "'");
}

VariableId Dataset::index_of(std::string_view name) const {
    const auto key = normalize_name(name);
    for (VariableId i = 0; i < names.size(); ++i)
        if (normalize_name(names[i]) == key) return i;
    throw std::invalid_argument("unknown variable: " + std::string(name));
}

void Dataset::validate() const {
    if (static_cast<std::size_t>(values.cols()) != names.size() || names.size() != kinds.size())
        throw std::invalid_argument("dataset shape mismatch");
    for (Eigen::Index j = 0; j < values.cols(); ++j)
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            const double v = values(i, j);
            if (!std::isfinite(v))
                throw std::invalid_argument("non-finite value in column " + names[j]);
            if (kinds[j] == VariableKind::Binary && v != 0.0 && v != 1.0)
                throw std::invalid_argument("binary column " + names[j] + " holds value " + std::to_string(v));
        }
}

Dataset Dataset::select_rows(const std::vector<Eigen::Index>& rows) const {
    Dataset out{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), values.cols()), names, kinds};
    for (std::size_t r = 0; r < rows.size(); ++r) out.values.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
    return out;
}

Dataset Dataset::select_columns(const std::vector<VariableId>& cols) const {
    Dataset out{Eigen::MatrixXd(values.rows(), static_cast<Eigen::Index>(cols.size())), {}, {}};
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out.values.col(static_cast<Eigen::Index>(c)) = values.col(static_cast<Eigen::Index>(cols[c]));
        out.names.push_back(names.at(cols[c]));
        out.kinds.push_back(kinds.at(cols[c]));
    }
    return out;
}

Dataset standardize(const Dataset& data) {
    Dataset out = data;
    const double n = static_cast<double>(data.rows());
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
        if (data.kinds[j] == VariableKind::Binary) continue;
        auto col = out.values.col(j);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
        if (sd > 0.0) col /= sd;
    }
    return out;
}

std::vector<Eigen::Index> bootstrap_rows(Eigen::Index n, Rng& rng) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    return rows;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    for (auto& cell : cells) {
        const auto first = cell.find_first_not_of(" \t");
        const auto last = cell.find_last_not_of(" \t");
        cell = first == std::string::npos ? std::string{} : cell.substr(first, last - first + 1);
    }
    return cells;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" || cell == "?";
}

}  // namespace

CsvLoad parse_csv(std::string_view text, const std::map<std::string, VariableKind>& kind_hints) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            header = split_csv_line(line);
            break;
        }
    if (header.empty()) throw std::invalid_argument("CSV is empty");

    CsvLoad result;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + " has " +
                                        std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(header.size()));
        std::vector<double> row(cells.size());
        bool missing = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (is_missing(cells[c])) {
                missing = true;
                continue;
            }
            const auto& cell = cells[c];
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            if (*first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, row[c]);
            if (ec != std::errc{} || ptr != last || !std::isfinite(row[c]))
                throw std::invalid_argument("non-numeric cell '" + cell + "' at line " + std::to_string(line_no) +
                                            ", column " + header[c]);
        }
        if (missing) {
            ++result.dropped_rows;
            continue;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("CSV has a header but no complete data rows");
    if (result.dropped_rows > 0)
        result.warnings.push_back("dropped " + std::to_string(result.dropped_rows) + " row(s) with missing values");

    Dataset& data = result.data;
    data.names = header;
    data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < header.size(); ++c)
            data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    std::map<std::string, VariableKind> hints;
    for (const auto& [name, kind] : kind_hints) hints[normalize_name(name)] = kind;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto col = data.values.col(static_cast<Eigen::Index>(c));
        const bool zero_one = (col.array() == 0.0 || col.array() == 1.0).all();
        auto kind = zero_one ? VariableKind::Binary : VariableKind::Continuous;
        if (auto it = hints.find(normalize_name(header[c])); it != hints.end()) {
            if (it->second == VariableKind::Binary && !zero_one)
                throw std::invalid_argument("column " + header[c] + " hinted binary but holds values other than 0/1");
            kind = it->second;
            hints.erase(it);
        }
        data.kinds.push_back(kind);
    }
    if (!hints.empty()) throw std::invalid_argument("kind hint for unknown column '" + hints.begin()->first + "'");
    return result;
}

CsvLoad load_csv(const std::filesystem::path& path, const std::map<std::string, VariableKind>& kind_hints) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), kind_hints);
}

std::string format_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.names.size(); ++c) out += (c ? "," : "") + data.names[c];
    out += '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.values.cols(); ++c) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.values(r, c));
            (void)ec;
            if (c) out += ',';
            out.append(buf, ptr);
        }
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file " + path.string());
    out << format_csv(data);
}

}  // namespace fairpath
