#ifndef WECON_DATASET_HPP
#define WECON_DATASET_HPP

#include <map>
#include <string>
#include <vector>

#include "wecon/problems.hpp"

namespace wecon {

/// Plain-text instance container. Each block is
///   MOCOP <kind> <n> <kappa>
///   one feature row per node (depot row first for Bi-CVRP)
///   CAPACITY <value>            (capacity problems only)
/// Values round-trip exactly (printed with 17 significant digits).
void write_instances(const std::string& path, const std::vector<Instance>& instances);
std::vector<Instance> read_instances(const std::string& path);

/// TSPLIB NODE_COORD_SECTION parser. Each file contributes one coordinate
/// set; two files form a bi-objective instance, three a tri-objective one.
/// Coordinates are rescaled to [0,1] by each file's largest coordinate.
/// Files must agree on the node count.
Instance load_tsplib_pair(const std::vector<std::string>& paths, const std::string& id = "");

/// key=value configuration text ('#' comments, blank lines ignored).
std::map<std::string, std::string> read_config(const std::string& path);

/// Objective-point CSV: header f1,f2[,f3], one point per row.
void write_points_csv(const std::string& path, const std::vector<std::vector<double>>& points);
std::vector<std::vector<double>> read_points_csv(const std::string& path);

/// Exact decimal text for a double (round-trips through strtod).
std::string format_double(double x);

}  // namespace wecon

#endif  // WECON_DATASET_HPP
