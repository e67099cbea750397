#pragma once

#include <adagraph/error.hpp>
#include <adagraph/hsi.hpp>
#include <adagraph/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <span>
#include <string>
#include <vector>

namespace adagraph {

/// Counts between predicted clusters (rows) and reference classes (columns).
struct ContingencyTable {
  std::vector<int> row_ids;  // original predicted ids, ascending
  std::vector<int> col_ids;  // original class ids, ascending
  Matrix counts;

  double total() const { return counts.sum(); }
};

inline ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw Error(ErrorCode::SizeMismatch, "prediction and reference lengths differ");
  ContingencyTable t;
  std::map<int, int> rows;
  std::map<int, int> cols;
  for (int p : pred) rows.emplace(p, 0);
  for (int c : truth) cols.emplace(c, 0);
  for (auto& [id, idx] : rows) {
    idx = static_cast<int>(t.row_ids.size());
    t.row_ids.push_back(id);
  }
  for (auto& [id, idx] : cols) {
    idx = static_cast<int>(t.col_ids.size());
    t.col_ids.push_back(id);
  }
  t.counts = Matrix::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) t.counts(rows[pred[i]], cols[truth[i]]) += 1.0;
  return t;
}

struct MatchResult {
  std::vector<int> row_to_col;  // -1 when a row is left unmatched (more rows than columns)
  double matched = 0.0;
};

/// Maximum-weight one-to-one row/column matching (Hungarian method, square-padded).
inline MatchResult hungarian_match(const Matrix& table) {
  if (table.rows() == 0 || table.cols() == 0) throw Error(ErrorCode::EmptyTable, "contingency table is empty");
  const Index n = std::max(table.rows(), table.cols());
  const double top = table.maxCoeff();
  // cost[i][j] = top - weight, 1-based with potentials u, v.
  auto cost = [&](Index i, Index j) {
    const double w = (i < table.rows() && j < table.cols()) ? table(i, j) : 0.0;
    return top - w;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(n + 1), 0);    // column -> row
  std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  MatchResult out;
  out.row_to_col.assign(static_cast<std::size_t>(table.rows()), -1);
  for (Index j = 1; j <= n; ++j) {
    const Index row = p[static_cast<std::size_t>(j)] - 1;
    if (row < table.rows() && j - 1 < table.cols()) {
      out.row_to_col[static_cast<std::size_t>(row)] = static_cast<int>(j - 1);
      out.matched += table(row, j - 1);
    }
  }
  return out;
}

struct ClassRecall {
  int class_id = 0;
  double recall = 0.0;
  double support = 0.0;
};

struct MetricsReport {
  double oa = 0.0;
  double kappa = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double purity = 0.0;
  std::size_t evaluated = 0;
  std::vector<ClassRecall> per_class;  // recall under the optimal cluster-to-class matching
};

namespace detail {

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

inline double entropy(const Vector& counts, double total) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i)
    if (counts[i] > 0.0) h -= counts[i] / total * std::log(counts[i] / total);
  return h;
}

}  // namespace detail

/// Scores a predicted partition against reference labels over every item.
inline MetricsReport compute_metrics(std::span<const int> pred, std::span<const int> truth) {
  if (pred.empty()) throw Error(ErrorCode::NoLabeledPixels, "nothing to evaluate");
  const ContingencyTable t = contingency(pred, truth);
  const Matrix& n_rc = t.counts;
  const double n = t.total();
  const Vector row_sum = n_rc.rowwise().sum();
  const Vector col_sum = n_rc.colwise().sum().transpose();

  MetricsReport r;
  r.evaluated = pred.size();
  const MatchResult match = hungarian_match(n_rc);
  r.oa = match.matched / n;

  // Kappa on the table whose rows are relabeled through the matching.
  Vector mapped_pred = Vector::Zero(col_sum.size());
  for (Index row = 0; row < n_rc.rows(); ++row) {
    const int col = match.row_to_col[static_cast<std::size_t>(row)];
    if (col >= 0) mapped_pred[col] += row_sum[row];
  }
  const double p_e = mapped_pred.dot(col_sum) / (n * n);
  r.kappa = p_e < 1.0 ? (r.oa - p_e) / (1.0 - p_e) : (r.oa >= 1.0 ? 1.0 : 0.0);

  const double h_u = detail::entropy(row_sum, n);
  const double h_v = detail::entropy(col_sum, n);
  double mi = 0.0;
  for (Index i = 0; i < n_rc.rows(); ++i)
    for (Index j = 0; j < n_rc.cols(); ++j) {
      const double c = n_rc(i, j);
      if (c > 0.0) mi += c / n * std::log(c * n / (row_sum[i] * col_sum[j]));
    }
  const double mean_h = 0.5 * (h_u + h_v);
  r.nmi = mean_h > 0.0 ? std::clamp(mi / mean_h, 0.0, 1.0) : 1.0;

  double index = 0.0;
  for (Index i = 0; i < n_rc.rows(); ++i)
    for (Index j = 0; j < n_rc.cols(); ++j) index += detail::choose2(n_rc(i, j));
  double a = 0.0;
  double b = 0.0;
  for (Index i = 0; i < row_sum.size(); ++i) a += detail::choose2(row_sum[i]);
  for (Index j = 0; j < col_sum.size(); ++j) b += detail::choose2(col_sum[j]);
  const double pairs = detail::choose2(n);
  const double expected = pairs > 0.0 ? a * b / pairs : 0.0;
  const double max_index = 0.5 * (a + b);
  r.ari = max_index - expected != 0.0 ? (index - expected) / (max_index - expected) : 1.0;

  r.purity = n_rc.rowwise().maxCoeff().sum() / n;

  for (Index j = 0; j < n_rc.cols(); ++j) {
    double hit = 0.0;
    for (Index i = 0; i < n_rc.rows(); ++i)
      if (match.row_to_col[static_cast<std::size_t>(i)] == j) hit += n_rc(i, j);
    r.per_class.push_back({t.col_ids[static_cast<std::size_t>(j)], hit / col_sum[j], col_sum[j]});
  }
  return r;
}

/// Pixel-level scoring; pixels with ground truth 0 are excluded.
inline MetricsReport compute_metrics(std::span<const int> pred_map, const GroundTruthMap& gt) {
  if (pred_map.size() != gt.labels.size()) throw Error(ErrorCode::SizeMismatch, "label map and ground truth dims differ");
  std::vector<int> p;
  std::vector<int> t;
  for (std::size_t i = 0; i < pred_map.size(); ++i)
    if (gt.labels[i] != 0) {
      p.push_back(pred_map[i]);
      t.push_back(gt.labels[i]);
    }
  if (p.empty()) throw Error(ErrorCode::NoLabeledPixels, "ground truth has no labeled pixel");
  return compute_metrics(p, t);
}

inline std::string metrics_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["oa"] = r.oa;
  j["kappa"] = r.kappa;
  j["nmi"] = r.nmi;
  j["ari"] = r.ari;
  j["purity"] = r.purity;
  j["evaluated"] = r.evaluated;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) per.push_back({{"class", c.class_id}, {"recall", c.recall}, {"support", c.support}});
  j["per_class_recall"] = per;
  return j.dump(2) + "\n";
}

inline std::string metrics_csv_header() { return "oa,kappa,nmi,ari,purity,evaluated\n"; }

inline std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << r.oa << ',' << r.kappa << ',' << r.nmi << ',' << r.ari << ',' << r.purity << ','
     << r.evaluated << '\n';
  return os.str();
}

struct ScatterDiagnostic {
  double intra = 0.0;  // mean over non-singleton clusters of the mean pairwise squared distance
  double inter = 0.0;  // mean pairwise squared distance between centroids
  bool singleton_only = false;
};

/// Compactness / separation of an embedding under a labeling.
inline ScatterDiagnostic scatter_diagnostic(const Matrix& z, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(z.rows())) throw Error(ErrorCode::SizeMismatch, "labels and rows differ");
  std::map<int, std::vector<Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<Index>(i));
  if (groups.size() < 2) throw Error(ErrorCode::ConfigInvalid, "scatter diagnostic needs at least two clusters");

  ScatterDiagnostic d;
  std::vector<Eigen::RowVectorXd> centroids;
  double intra_sum = 0.0;
  int intra_count = 0;
  for (const auto& [label, members] : groups) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(z.cols());
    double sq = 0.0;
    for (Index i : members) {
      mean += z.row(i);
      sq += z.row(i).squaredNorm();
    }
    const auto m = static_cast<double>(members.size());
    mean /= m;
    centroids.push_back(mean);
    if (members.size() < 2) continue;
    // sum_{i<j} ||z_i - z_j||^2 = m * sum ||z_i||^2 - ||sum z_i||^2
    const double pair_sum = m * sq - (mean * m).squaredNorm();
    intra_sum += std::max(0.0, pair_sum) / detail::choose2(m);
    ++intra_count;
  }
  if (intra_count == 0)
    d.singleton_only = true;
  else
    d.intra = intra_sum / intra_count;
  double inter = 0.0;
  for (std::size_t a = 0; a < centroids.size(); ++a)
    for (std::size_t b = a + 1; b < centroids.size(); ++b) inter += (centroids[a] - centroids[b]).squaredNorm();
  d.inter = inter / detail::choose2(static_cast<double>(centroids.size()));
  return d;
}

}  // namespace adagraph
