#include "mbt/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace mbt {

namespace {

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size() && tok.size() > 0;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            toks.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    toks.push_back(cur);
    for (std::string& t : toks) {
        std::size_t a = t.find_first_not_of(" \t");
        std::size_t b = t.find_last_not_of(" \t");
        t = a == std::string::npos ? "" : t.substr(a, b - a + 1);
    }
    return toks;
}

struct id_interner {
    std::unordered_map<std::string, vertex_id> index;
    std::vector<std::string> names;

    vertex_id get(const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        vertex_id id = static_cast<vertex_id>(names.size());
        index.emplace(name, id);
        names.push_back(name);
        return id;
    }
};

}  // namespace

std::string format_double(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    return buf;
}

loaded_graph load_edge_list(const std::string& path, weight_mode mode) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open edge list: " + path);

    id_interner ids;
    std::vector<edge> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 3)
            throw parse_error(path + ":" + std::to_string(lineno) + ": expected `u v weight`");
        double w = 0.0;
        if (!parse_double(toks[2], w))
            throw parse_error(path + ":" + std::to_string(lineno) + ": bad weight `" + toks[2] + "`");
        rows.push_back({ids.get(toks[0]), ids.get(toks[1]), w});
    }

    loaded_graph out;
    out.vertex_names = std::move(ids.names);
    out.graph = weighted_graph::from_edge_list(rows, mode, out.vertex_names.size());
    return out;
}

void save_edge_list(const std::string& path, const weighted_graph& g,
                    const std::vector<std::string>& names) {
    if (!names.empty() && names.size() != g.num_vertices())
        throw domain_error("save_edge_list: names size mismatch");
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    for (const edge& e : g.edges()) {
        if (names.empty())
            out << e.u << ' ' << e.v;
        else
            out << names[e.u] << ' ' << names[e.v];
        out << ' ' << format_double(e.weight) << '\n';
    }
}

partition load_labels(const std::string& path, const std::vector<std::string>& vertex_names) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open label file: " + path);

    std::unordered_map<std::string, vertex_id> vertex_index;
    for (vertex_id i = 0; i < vertex_names.size(); ++i) vertex_index.emplace(vertex_names[i], i);

    const std::uint32_t unset = UINT32_MAX;
    std::vector<std::uint32_t> labels(vertex_names.size(), unset);
    id_interner label_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 2)
            throw parse_error(path + ":" + std::to_string(lineno) + ": expected `u label`");
        auto it = vertex_index.find(toks[0]);
        if (it == vertex_index.end())
            throw parse_error(path + ":" + std::to_string(lineno) + ": unknown vertex `" + toks[0] + "`");
        if (labels[it->second] != unset)
            throw parse_error(path + ":" + std::to_string(lineno) + ": vertex `" + toks[0] +
                              "` labeled twice");
        labels[it->second] = label_ids.get(toks[1]);
    }
    for (vertex_id v = 0; v < labels.size(); ++v)
        if (labels[v] == unset)
            throw parse_error(path + ": vertex `" + vertex_names[v] + "` has no label");
    const std::uint32_t k = label_ids.names.empty() ? 1 : static_cast<std::uint32_t>(label_ids.names.size());
    return partition::from_labels(std::move(labels), k);
}

void save_labels(const std::string& path, const partition& z, const std::vector<std::string>& names) {
    if (!names.empty() && names.size() != z.size())
        throw domain_error("save_labels: names size mismatch");
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    for (std::size_t v = 0; v < z.size(); ++v) {
        if (names.empty())
            out << v;
        else
            out << names[v];
        out << ' ' << z.labels[v] << '\n';
    }
}

point_cloud load_points_csv(const std::string& path, std::optional<int> label_col) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open points file: " + path);

    std::vector<std::vector<double>> coords;
    std::vector<std::uint32_t> labels;
    id_interner label_ids;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> toks = split_csv(line);
        if (toks.size() == 1 && toks[0].empty()) continue;

        if (first_data_line) {
            ncols = toks.size();
            if (label_col && (*label_col < 0 || static_cast<std::size_t>(*label_col) >= ncols))
                throw parse_error(path + ": label column " + std::to_string(*label_col) +
                                  " out of range for " + std::to_string(ncols) + " columns");
            bool numeric = true;
            for (std::size_t c = 0; c < ncols; ++c) {
                if (label_col && static_cast<std::size_t>(*label_col) == c) continue;
                double tmp;
                if (!parse_double(toks[c], tmp)) numeric = false;
            }
            first_data_line = false;
            if (!numeric) continue;  // header row
        }
        if (toks.size() != ncols)
            throw parse_error(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(ncols) + " columns");

        std::vector<double> row;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (label_col && static_cast<std::size_t>(*label_col) == c) {
                labels.push_back(label_ids.get(toks[c]));
                continue;
            }
            double x;
            if (!parse_double(toks[c], x) || !std::isfinite(x))
                throw parse_error(path + ":" + std::to_string(lineno) + ": bad value `" + toks[c] + "`");
            row.push_back(x);
        }
        if (row.empty())
            throw parse_error(path + ":" + std::to_string(lineno) + ": point has no coordinates");
        coords.push_back(std::move(row));
    }
    if (coords.empty()) throw empty_result("no points in " + path);

    point_cloud out;
    out.points.resize(coords.size(), coords[0].size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = 0; j < coords[i].size(); ++j) out.points(i, j) = coords[i][j];
    if (label_col) {
        const std::uint32_t k = label_ids.names.empty() ? 1 : static_cast<std::uint32_t>(label_ids.names.size());
        out.labels = partition::from_labels(std::move(labels), k);
    }
    return out;
}

}  // namespace mbt
