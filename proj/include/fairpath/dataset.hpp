#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fairpath/graph.hpp"

namespace fairpath {

class Rng;

enum class VariableKind { Continuous, Binary };

std::string_view to_string(VariableKind kind);
VariableKind parse_kind(std::string_view text);

/// Column-typed numeric table: n rows (samples) by d columns (variables).
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> names;
    std::vector<VariableKind> kinds;

    Eigen::Index rows() const { return values.rows(); }
    std::size_t cols() const { return names.size(); }

    /// Lookup by normalized name; throws std::invalid_argument when absent.
    VariableId index_of(std::string_view name) const;
    bool is_binary(VariableId v) const { return kinds.at(v) == VariableKind::Binary; }

    /// Throws std::invalid_argument if shapes disagree, a Binary column holds a
    /// value other than 0/1, or a cell is not finite.
    void validate() const;

    Dataset select_rows(const std::vector<Eigen::Index>& rows) const;
    Dataset select_columns(const std::vector<VariableId>& cols) const;
};

/// Zero mean, unit variance for every Continuous column. Binary columns are untouched.
Dataset standardize(const Dataset& data);

/// n rows drawn with replacement.
std::vector<Eigen::Index> bootstrap_rows(Eigen::Index n, Rng& rng);

struct CsvLoad {
    Dataset data;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

/// Header row of names, then numeric rows. A column is Binary iff every value is
/// 0 or 1 unless `kind_hints` (keyed by name) says otherwise. Rows with a
/// missing cell (empty, NA, NaN, ?) are dropped and counted.
CsvLoad load_csv(const std::filesystem::path& path,
                 const std::map<std::string, VariableKind>& kind_hints = {});
CsvLoad parse_csv(std::string_view text, const std::map<std::string, VariableKind>& kind_hints = {});

void save_csv(const Dataset& data, const std::filesystem::path& path);
std::string format_csv(const Dataset& data);

}  // namespace fairpath
