/*
 * Copyright 2026 The mobsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mobsim/error.hpp"
#include "mobsim/geo.hpp"

namespace mobsim::world {

using NodeIndex = std::uint32_t;

struct RoadEdge {
  NodeIndex from = 0;
  NodeIndex to = 0;
  double length_m = 0.0;
  double speed_mps = 0.0;

  double seconds() const { return length_m / speed_mps; }
};

// One row of an edge-list file, before node indexing.
struct RawEdge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  LatLon pu;
  LatLon pv;
  double length_m = 0.0;
  double speed_mps = 0.0;
};

// Directed road graph in CSR form, node indices dense in [0, num_nodes).
class RoadGraph {
 public:
  RoadGraph() = default;

  RoadGraph(std::vector<std::int64_t> node_ids, std::vector<LatLon> coords,
            std::vector<RoadEdge> edges)
      : node_ids_(std::move(node_ids)), coords_(std::move(coords)) {
    const std::size_t n = coords_.size();
    for (const auto& e : edges) {
      if (e.from >= n || e.to >= n) throw ConfigError("edge references unknown node");
      if (!(e.length_m > 0.0) || !(e.speed_mps > 0.0)) {
        throw ConfigError("edge length and speed must be positive");
      }
    }
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges) ++offsets_[e.from + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    edges_.resize(edges.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) edges_[fill[e.from]++] = e;
  }

  std::size_t num_nodes() const { return coords_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return coords_.empty(); }

  LatLon node(NodeIndex i) const { return coords_[i]; }
  std::int64_t node_id(NodeIndex i) const { return node_ids_[i]; }
  std::span<const LatLon> coords() const { return coords_; }
  std::span<const RoadEdge> edges() const { return edges_; }

  std::span<const RoadEdge> out_edges(NodeIndex i) const {
    return std::span<const RoadEdge>(edges_).subspan(offsets_[i],
                                                     offsets_[i + 1] - offsets_[i]);
  }

 private:
  std::vector<std::int64_t> node_ids_;
  std::vector<LatLon> coords_;
  std::vector<std::size_t> offsets_{0};
  std::vector<RoadEdge> edges_;
};

// Builds a graph from raw edges and keeps only the largest weakly connected
// component. Nodes that appear in no edge never enter the graph.
inline RoadGraph build_road_graph(std::span<const RawEdge> raw) {
  if (raw.empty()) throw ConfigError("road graph has no edges");
  std::unordered_map<std::int64_t, NodeIndex> index;
  std::vector<std::int64_t> ids;
  std::vector<LatLon> coords;
  auto intern = [&](std::int64_t id, LatLon p) {
    auto [it, fresh] = index.emplace(id, static_cast<NodeIndex>(ids.size()));
    if (fresh) {
      ids.push_back(id);
      coords.push_back(p);
    }
    return it->second;
  };
  std::vector<RoadEdge> edges;
  edges.reserve(raw.size());
  for (const auto& r : raw) {
    edges.push_back({intern(r.u, r.pu), intern(r.v, r.pv), r.length_m, r.speed_mps});
  }

  // Union-find for weak connectivity.
  std::vector<NodeIndex> parent(ids.size());
  std::iota(parent.begin(), parent.end(), NodeIndex{0});
  auto find = [&](NodeIndex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) parent[find(e.from)] = find(e.to);
  std::vector<std::size_t> size(ids.size(), 0);
  for (NodeIndex i = 0; i < ids.size(); ++i) ++size[find(i)];
  const NodeIndex root = static_cast<NodeIndex>(
      std::max_element(size.begin(), size.end()) - size.begin());

  std::vector<NodeIndex> remap(ids.size(), NodeIndex(-1));
  std::vector<std::int64_t> kept_ids;
  std::vector<LatLon> kept_coords;
  for (NodeIndex i = 0; i < ids.size(); ++i) {
    if (find(i) != root) continue;
    remap[i] = static_cast<NodeIndex>(kept_ids.size());
    kept_ids.push_back(ids[i]);
    kept_coords.push_back(coords[i]);
  }
  std::vector<RoadEdge> kept_edges;
  for (const auto& e : edges) {
    if (remap[e.from] == NodeIndex(-1)) continue;
    kept_edges.push_back({remap[e.from], remap[e.to], e.length_m, e.speed_mps});
  }
  return RoadGraph(std::move(kept_ids), std::move(kept_coords), std::move(kept_edges));
}

inline constexpr const char* kEdgeListHeader =
    "u,v,lat_u,lon_u,lat_v,lon_v,length_m,speed_mps";

// Parses the comma-separated edge list. A header row matching
// kEdgeListHeader and lines starting with '#' are skipped.
inline std::vector<RawEdge> parse_edge_list(std::istream& in) {
  std::vector<RawEdge> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == kEdgeListHeader) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) {
      throw ParseError("expected 8 columns, found " + std::to_string(cells.size()),
                       lineno);
    }
    RawEdge e;
    try {
      std::size_t used = 0;
      auto as_int = [&](const std::string& s) {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::int64_t>(v);
      };
      auto as_double = [&](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      e.u = as_int(cells[0]);
      e.v = as_int(cells[1]);
      e.pu = {as_double(cells[2]), as_double(cells[3])};
      e.pv = {as_double(cells[4]), as_double(cells[5])};
      e.length_m = as_double(cells[6]);
      e.speed_mps = as_double(cells[7]);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", lineno);
    }
    if (!(e.length_m > 0.0)) throw ParseError("length_m must be positive", lineno);
    if (!(e.speed_mps > 0.0)) throw ParseError("speed_mps must be positive", lineno);
    if (!valid_coordinate(e.pu) || !valid_coordinate(e.pv)) {
      throw ParseError("coordinate out of range", lineno);
    }
    out.push_back(e);
  }
  return out;
}

inline RoadGraph load_road_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open road graph '" + path + "'");
  const auto raw = parse_edge_list(in);
  if (raw.empty()) throw ConfigError("road graph '" + path + "' is empty");
  return build_road_graph(raw);
}

inline void write_edge_list(const RoadGraph& g, std::ostream& out) {
  out << kEdgeListHeader << '\n';
  out.precision(17);
  for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
    for (const auto& e : g.out_edges(u)) {
      const LatLon a = g.node(e.from);
      const LatLon b = g.node(e.to);
      out << g.node_id(e.from) << ',' << g.node_id(e.to) << ',' << a.lat << ','
          << a.lon << ',' << b.lat << ',' << b.lon << ',' << e.length_m << ','
          << e.speed_mps << '\n';
    }
  }
}

struct GridGraphConfig {
  int rows = 41;
  int cols = 41;
  double spacing_m = 1000.0;
  double speed_mps = 11.2;
  // Every k-th row/column is an arterial with its own speed; 0 disables.
  int arterial_every = 5;
  double arterial_speed_mps = 20.1;
  LatLon center{34.05, -118.25};
};

// Synthetic street grid with two-way links between 4-neighbours.
inline RoadGraph generate_grid_graph(const GridGraphConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1 || cfg.rows * cfg.cols < 2) {
    throw ConfigError("grid needs at least two nodes");
  }
  if (!(cfg.spacing_m > 0.0) || !(cfg.speed_mps > 0.0)) {
    throw ConfigError("grid spacing and speed must be positive");
  }
  const LatLon sw = offset_m(cfg.center, -(cfg.rows - 1) * cfg.spacing_m / 2,
                             -(cfg.cols - 1) * cfg.spacing_m / 2);
  auto id = [&](int r, int c) { return static_cast<std::int64_t>(r) * cfg.cols + c; };
  auto at = [&](int r, int c) {
    return offset_m(sw, r * cfg.spacing_m, c * cfg.spacing_m);
  };
  auto arterial = [&](int line) {
    return cfg.arterial_every > 0 && line % cfg.arterial_every == 0;
  };
  std::vector<RawEdge> raw;
  auto link = [&](int r0, int c0, int r1, int c1, double speed) {
    raw.push_back({id(r0, c0), id(r1, c1), at(r0, c0), at(r1, c1), cfg.spacing_m, speed});
    raw.push_back({id(r1, c1), id(r0, c0), at(r1, c1), at(r0, c0), cfg.spacing_m, speed});
  };
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      if (c + 1 < cfg.cols) {
        link(r, c, r, c + 1, arterial(r) ? cfg.arterial_speed_mps : cfg.speed_mps);
      }
      if (r + 1 < cfg.rows) {
        link(r, c, r + 1, c, arterial(c) ? cfg.arterial_speed_mps : cfg.speed_mps);
      }
    }
  }
  return build_road_graph(raw);
}

}  // namespace mobsim::world
