#include "cdrev/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cdrev {

ContactCounts contact_counts(const ContactGraph& graph, const UserSet& attenders) {
  const auto& nodes = graph.nodes();
  const auto n = static_cast<std::int64_t>(nodes.size());

  std::vector<bool> in_u(graph.universe(), false);
  for (UserId u : attenders) {
    if (index_of(u) < in_u.size()) in_u[index_of(u)] = true;
  }

  std::vector<std::uint32_t> k(nodes.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    std::uint32_t c = 0;
    for (UserId v : graph.neighbors(nodes[i])) {
      c += in_u[index_of(v)] ? 1 : 0;
    }
    k[i] = c;
  }

  ContactCounts out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (k[i] > 0) out.emplace_back(nodes[i], k[i]);
  }
  return out;
}

AttendanceTable attendance_probability(const ContactGraph& graph, const UserSet& attenders,
                                       InferenceOptions options) {
  if (attenders.empty()) {
    throw std::invalid_argument("attendance probability needs a non-empty attender set");
  }
  AttendanceTable table;
  for (auto [user, k] : contact_counts(graph, attenders)) {
    if (options.clients_only && !graph.is_client(user)) continue;
    auto& row = table.rows[k];
    ++row.denominator;
    if (attenders.contains(user)) ++row.numerator;
  }
  for (auto& [k, row] : table.rows) {
    row.p = static_cast<double>(row.numerator) / static_cast<double>(row.denominator);
  }
  return table;
}

CumulativeTable cumulative_attendance_probability(const ContactGraph& graph,
                                                  const UserSet& attenders,
                                                  InferenceOptions options) {
  const auto table = attendance_probability(graph, attenders, options);
  CumulativeTable out;
  if (table.rows.empty()) {
    return out;
  }
  const std::uint32_t max_k = table.rows.rbegin()->first;
  AttendanceRow running;
  for (std::uint32_t big_k = max_k; big_k >= 1; --big_k) {
    if (auto it = table.rows.find(big_k); it != table.rows.end()) {
      running.numerator += it->second.numerator;
      running.denominator += it->second.denominator;
    }
    running.p = static_cast<double>(running.numerator) / static_cast<double>(running.denominator);
    out[big_k] = running;
  }
  return out;
}

LinearFit linear_fit(std::span<const FitPoint> points) {
  std::set<double> distinct;
  for (const auto& pt : points) distinct.insert(pt.k);
  if (distinct.size() < 2) {
    throw std::invalid_argument("linear fit needs at least two distinct k values");
  }

  const double n = static_cast<double>(points.size());
  double mean_k = 0.0;
  double mean_p = 0.0;
  for (const auto& pt : points) {
    mean_k += pt.k;
    mean_p += pt.p;
  }
  mean_k /= n;
  mean_p /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : points) {
    const double dx = pt.k - mean_k;
    const double dy = pt.p - mean_p;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  LinearFit fit;
  fit.n_points = points.size();
  fit.slope = sxy / sxx;
  fit.intercept = mean_p - fit.slope * mean_k;
  if (syy == 0.0) {
    fit.r = 0.0;
    fit.degenerate = true;
  } else {
    fit.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  }
  return fit;
}

std::vector<FitPoint> fit_points(const AttendanceTable& table, std::uint64_t min_denominator) {
  std::vector<FitPoint> out;
  for (const auto& [k, row] : table.rows) {
    if (row.denominator >= min_denominator) {
      out.push_back({static_cast<double>(k), row.p});
    }
  }
  return out;
}

}  // namespace cdrev
