#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbt/graph.hpp"
#include "mbt/transforms.hpp"

namespace mbt {

/// Graph plus the original vertex names. Input files may use arbitrary
/// string or sparse integer ids; construction assigns dense ids in order of
/// first appearance and keeps the original spelling for output.
struct loaded_graph {
    weighted_graph graph;
    std::vector<std::string> vertex_names;  // dense id -> original id string
};

/// Reads a whitespace-separated edge list `u v weight`, one edge per line.
/// Blank lines and lines starting with `#` are ignored.
loaded_graph load_edge_list(const std::string& path, weight_mode mode);

/// Writes `u v weight` lines in canonical edge order. When names is empty,
/// dense ids are written directly. Weights use round-trip precision.
void save_edge_list(const std::string& path, const weighted_graph& g,
                    const std::vector<std::string>& names = {});

/// Reads `u label` lines; u is resolved through vertex_names of the graph the
/// labels belong to. Label values may be arbitrary strings and are densified
/// in order of first appearance. Every vertex must be labeled exactly once.
partition load_labels(const std::string& path, const std::vector<std::string>& vertex_names);

void save_labels(const std::string& path, const partition& z,
                 const std::vector<std::string>& names = {});

/// Reads a CSV of points, one row per point. label_col selects a 0-based
/// column holding community labels (densified strings); the remaining columns
/// must be finite reals. A non-numeric first row is treated as a header.
point_cloud load_points_csv(const std::string& path,
                            std::optional<int> label_col = std::nullopt);

/// Formats a double with round-trip precision (shortest %.17g form).
std::string format_double(double x);

}  // namespace mbt
