#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "saarp/rng.hpp"

namespace saarp {

struct SbsNode {
  int id = 0;       // dense 1..M
  double x = 0.0;   // meters
  double y = 0.0;
  double radius = 0.0;  // coverage radius, meters
  int capacity = 0;     // b_j, deployable candidate slots
};

struct Device {
  int id = 0;  // dense 1..N
  double x = 0.0;
  double y = 0.0;
};

inline double euclid(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

// SBS graph with all-pairs hop counts plus device coverage/attachment.
// Immutable after construction; safe for concurrent reads.
class HetNetTopology {
 public:
  static constexpr int kNoSbs = 0;  // "nearest" when no coverage

  HetNetTopology(std::vector<SbsNode> sbs, std::vector<Device> devices,
                 std::set<std::pair<int, int>> edges)
      : sbs_(std::move(sbs)), devices_(std::move(devices)),
        edges_(std::move(edges)) {
    check_nodes();
    compute_hops();
    compute_coverage();
  }

  int sbs_count() const { return static_cast<int>(sbs_.size()); }
  int device_count() const { return static_cast<int>(devices_.size()); }
  const std::vector<SbsNode>& sbs_list() const { return sbs_; }
  const std::vector<Device>& devices() const { return devices_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }

  const SbsNode& sbs(int id) const {
    check_sbs_id(id);
    return sbs_[static_cast<std::size_t>(id - 1)];
  }
  const Device& device(int id) const {
    check_device_id(id);
    return devices_[static_cast<std::size_t>(id - 1)];
  }

  // zeta(j1, j2): shortest hop count on the SBS graph.
  int hop_count(int j1, int j2) const {
    check_sbs_id(j1);
    check_sbs_id(j2);
    return hops_[static_cast<std::size_t>(j1 - 1) *
                     static_cast<std::size_t>(sbs_count()) +
                 static_cast<std::size_t>(j2 - 1)];
  }

  // Raw row of the hop matrix for SBS j (0-based over j2-1).
  const int* hop_row(int j) const {
    check_sbs_id(j);
    return hops_.data() +
           static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(sbs_count());
  }

  int diameter() const {
    return *std::max_element(hops_.begin(), hops_.end());
  }

  // M_i: SBS ids whose radius covers device i (sorted ascending).
  const std::vector<int>& coverage(int i) const {
    check_device_id(i);
    return coverage_[static_cast<std::size_t>(i - 1)];
  }

  // j*_i, or kNoSbs when the device is uncovered.
  int nearest(int i) const {
    check_device_id(i);
    return nearest_[static_cast<std::size_t>(i - 1)];
  }

  bool covered(int i) const { return nearest(i) != kNoSbs; }

  void export_snapshot(std::ostream& out) const {
    out << "sbs_id,x_m,y_m,radius_m,capacity\n";
    char buf[160];
    for (const auto& s : sbs_) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d\n", s.id, s.x,
                    s.y, s.radius, s.capacity);
      out << buf;
    }
    for (const auto& [a, b] : edges_) out << "edge," << a << "," << b << "\n";
    for (const auto& d : devices_) {
      std::snprintf(buf, sizeof(buf), "device,%d,%.17g,%.17g\n", d.id, d.x,
                    d.y);
      out << buf;
    }
  }

  void export_snapshot_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    export_snapshot(out);
  }

 private:
  void check_sbs_id(int id) const {
    if (id < 1 || id > sbs_count())
      throw std::out_of_range("unknown SBS id " + std::to_string(id));
  }
  void check_device_id(int id) const {
    if (id < 1 || id > device_count())
      throw std::out_of_range("unknown device id " + std::to_string(id));
  }

  void check_nodes() const {
    for (std::size_t k = 0; k < sbs_.size(); ++k) {
      const auto& s = sbs_[k];
      if (s.id != static_cast<int>(k) + 1)
        throw std::invalid_argument("SBS ids must be dense 1..M");
      if (s.radius <= 0.0) throw std::invalid_argument("SBS radius must be > 0");
      if (s.capacity < 0) throw std::invalid_argument("SBS capacity must be >= 0");
    }
    for (std::size_t k = 0; k < devices_.size(); ++k)
      if (devices_[k].id != static_cast<int>(k) + 1)
        throw std::invalid_argument("device ids must be dense 1..N");
    for (const auto& [a, b] : edges_) {
      if (a < 1 || a > static_cast<int>(sbs_.size()) || b < 1 ||
          b > static_cast<int>(sbs_.size()) || a >= b)
        throw std::invalid_argument("edge endpoints must be ordered SBS ids");
    }
  }

  void compute_hops() {
    const int m = sbs_count();
    const int inf = std::numeric_limits<int>::max() / 4;
    hops_.assign(static_cast<std::size_t>(m) * m, inf);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
    for (const auto& [a, b] : edges_) {
      adj[static_cast<std::size_t>(a - 1)].push_back(b - 1);
      adj[static_cast<std::size_t>(b - 1)].push_back(a - 1);
    }
    // BFS from every vertex.
    for (int src = 0; src < m; ++src) {
      int* row = hops_.data() + static_cast<std::size_t>(src) * m;
      row[src] = 0;
      std::queue<int> q;
      q.push(src);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
          if (row[v] > row[u] + 1) {
            row[v] = row[u] + 1;
            q.push(v);
          }
        }
      }
    }
    for (int v : hops_)
      if (v >= inf)
        throw std::invalid_argument("SBS graph must be connected");
  }

  void compute_coverage() {
    coverage_.assign(devices_.size(), {});
    nearest_.assign(devices_.size(), kNoSbs);
    for (std::size_t k = 0; k < devices_.size(); ++k) {
      const auto& d = devices_[k];
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : sbs_) {
        double dist = euclid(d.x, d.y, s.x, s.y);
        if (dist <= s.radius) {
          coverage_[k].push_back(s.id);
          if (dist < best) {  // ties keep the smaller id (ascending scan)
            best = dist;
            nearest_[k] = s.id;
          }
        }
      }
    }
  }

  std::vector<SbsNode> sbs_;
  std::vector<Device> devices_;
  std::set<std::pair<int, int>> edges_;
  std::vector<int> hops_;                  // M*M row-major
  std::vector<std::vector<int>> coverage_; // per device, sorted
  std::vector<int> nearest_;               // per device
};

namespace detail {

inline std::vector<int> bfs_from(const std::vector<std::vector<int>>& adj,
                                 int src) {
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<int> dist(adj.size(), inf);
  dist[static_cast<std::size_t>(src)] = 0;
  std::queue<int> q;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (dist[static_cast<std::size_t>(v)] >
          dist[static_cast<std::size_t>(u)] + 1) {
        dist[static_cast<std::size_t>(v)] =
            dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
  }
  return dist;
}

}  // namespace detail

// Connects every SBS to its k nearest neighbors, then bridges components via
// the geometrically shortest cross edge and shortcuts the most hop-distant
// pair until the hop diameter fits max_diameter.
inline std::set<std::pair<int, int>> build_graph(
    const std::vector<SbsNode>& sbs_list, int max_diameter = 4,
    std::uint64_t /*seed*/ = 0, int k_neighbors = 3) {
  const int m = static_cast<int>(sbs_list.size());
  if (m < 1) throw std::invalid_argument("build_graph needs at least one SBS");
  if (max_diameter < 1) throw std::invalid_argument("max_diameter must be >= 1");
  std::set<std::pair<int, int>> edges;
  if (m == 1) return edges;

  auto add_edge = [&edges](int a, int b) {
    edges.insert({std::min(a, b), std::max(a, b)});
  };

  const int k = std::min(k_neighbors, m - 1);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      order.emplace_back(euclid(sbs_list[i].x, sbs_list[i].y, sbs_list[j].x,
                                sbs_list[j].y),
                         j);
    }
    std::sort(order.begin(), order.end());
    for (int t = 0; t < k; ++t) add_edge(i + 1, order[t].second + 1);
  }

  auto adjacency = [&]() {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
    for (const auto& [a, b] : edges) {
      adj[static_cast<std::size_t>(a - 1)].push_back(b - 1);
      adj[static_cast<std::size_t>(b - 1)].push_back(a - 1);
    }
    return adj;
  };

  const int inf = std::numeric_limits<int>::max() / 4;

  // Bridge disconnected components with the shortest cross edge.
  for (;;) {
    auto dist = detail::bfs_from(adjacency(), 0);
    int best_a = -1, best_b = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int u = 0; u < m; ++u) {
      if (dist[static_cast<std::size_t>(u)] < inf) continue;
      for (int v = 0; v < m; ++v) {
        if (dist[static_cast<std::size_t>(v)] >= inf) continue;
        double d = euclid(sbs_list[u].x, sbs_list[u].y, sbs_list[v].x,
                          sbs_list[v].y);
        if (d < best_d) {
          best_d = d;
          best_a = u;
          best_b = v;
        }
      }
    }
    if (best_a < 0) break;
    add_edge(best_a + 1, best_b + 1);
  }

  // Shortcut the most hop-distant pair until the diameter constraint holds.
  for (;;) {
    auto adj = adjacency();
    int worst = 0, wa = -1, wb = -1;
    for (int u = 0; u < m; ++u) {
      auto dist = detail::bfs_from(adj, u);
      for (int v = u + 1; v < m; ++v)
        if (dist[static_cast<std::size_t>(v)] > worst) {
          worst = dist[static_cast<std::size_t>(v)];
          wa = u;
          wb = v;
        }
    }
    if (worst <= max_diameter) break;
    add_edge(wa + 1, wb + 1);
  }
  return edges;
}

// Uniform radius/capacity draws shared by the CSV and synthetic paths.
inline HetNetTopology finish_topology(std::vector<SbsNode> sbs,
                                      std::vector<Device> devices,
                                      std::pair<double, double> radius_range,
                                      std::pair<int, int> capacity_range,
                                      RngStream& rng, int max_diameter = 4) {
  if (radius_range.first > radius_range.second ||
      capacity_range.first > capacity_range.second)
    throw std::invalid_argument("malformed range");
  for (auto& s : sbs) {
    s.radius = rng.uniform_real(radius_range.first, radius_range.second);
    s.capacity = rng.uniform_int(capacity_range.first, capacity_range.second);
  }
  auto edges = build_graph(sbs, max_diameter, 0);
  return HetNetTopology(std::move(sbs), std::move(devices), std::move(edges));
}

struct GeoRow {
  std::string kind;  // "sbs" or "user"
  double lat = 0.0;
  double lon = 0.0;
};

inline std::vector<GeoRow> parse_geolocation_csv(std::istream& in) {
  std::vector<GeoRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, kind, lat, lon;
    if (!std::getline(ss, id, ',') || !std::getline(ss, kind, ',') ||
        !std::getline(ss, lat, ',') || !std::getline(ss, lon, ','))
      throw std::runtime_error("malformed CSV row at line " +
                               std::to_string(lineno));
    if (kind != "sbs" && kind != "user")
      throw std::runtime_error("unknown kind '" + kind + "' at line " +
                               std::to_string(lineno));
    GeoRow row;
    row.kind = kind;
    try {
      row.lat = std::stod(lat);
      row.lon = std::stod(lon);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed coordinate at line " +
                               std::to_string(lineno));
    }
    rows.push_back(row);
  }
  return rows;
}

inline HetNetTopology load_geolocation_csv(
    const std::string& path, int n, int m,
    std::pair<double, double> radius_range, std::pair<int, int> capacity_range,
    std::uint64_t seed, int max_diameter = 4) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto rows = parse_geolocation_csv(in);

  std::vector<GeoRow> sbs_rows, user_rows;
  double lat0 = 0.0, lon0 = 0.0;
  for (const auto& r : rows) {
    lat0 += r.lat;
    lon0 += r.lon;
    (r.kind == "sbs" ? sbs_rows : user_rows).push_back(r);
  }
  if (static_cast<int>(sbs_rows.size()) < m ||
      static_cast<int>(user_rows.size()) < n)
    throw std::runtime_error("dataset has fewer rows than requested");
  lat0 /= static_cast<double>(rows.size());
  lon0 /= static_cast<double>(rows.size());

  // Equirectangular projection about the dataset centroid.
  constexpr double kEarthRadiusM = 6371000.0;
  constexpr double kDeg = std::numbers::pi / 180.0;
  auto project = [&](const GeoRow& r) {
    double x = kEarthRadiusM * (r.lon - lon0) * kDeg * std::cos(lat0 * kDeg);
    double y = kEarthRadiusM * (r.lat - lat0) * kDeg;
    return std::pair<double, double>{x, y};
  };

  RngStream rng(seed, /*stream_id=*/0x70706f);
  std::shuffle(sbs_rows.begin(), sbs_rows.end(), rng.engine());
  std::shuffle(user_rows.begin(), user_rows.end(), rng.engine());

  std::vector<SbsNode> sbs(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto [x, y] = project(sbs_rows[static_cast<std::size_t>(j)]);
    sbs[static_cast<std::size_t>(j)] = {j + 1, x, y, 1.0, 0};
  }
  std::vector<Device> devices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto [x, y] = project(user_rows[static_cast<std::size_t>(i)]);
    devices[static_cast<std::size_t>(i)] = {i + 1, x, y};
  }
  return finish_topology(std::move(sbs), std::move(devices), radius_range,
                         capacity_range, rng, max_diameter);
}

inline HetNetTopology synth_generate(int n, int m, double area_side_m,
                                     std::pair<double, double> radius_range,
                                     std::pair<int, int> capacity_range,
                                     std::uint64_t seed,
                                     int max_diameter = 4) {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
  RngStream rng(seed, /*stream_id=*/0x73796e);
  std::vector<SbsNode> sbs(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    sbs[static_cast<std::size_t>(j)] = {j + 1,
                                        rng.uniform_real(0.0, area_side_m),
                                        rng.uniform_real(0.0, area_side_m),
                                        1.0, 0};
  std::vector<Device> devices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    devices[static_cast<std::size_t>(i)] = {i + 1,
                                            rng.uniform_real(0.0, area_side_m),
                                            rng.uniform_real(0.0, area_side_m)};
  return finish_topology(std::move(sbs), std::move(devices), radius_range,
                         capacity_range, rng, max_diameter);
}

}  // namespace saarp
