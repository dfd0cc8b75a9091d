#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sdm/error.hpp"
#include "sdm/evaluation.hpp"
#include "sdm/interference.hpp"
#include "sdm/landscape.hpp"
#include "sdm/report_io.hpp"
#include "sdm/timing.hpp"
#include "sdm/train.hpp"
#include "test_support.hpp"

using namespace sdm;

namespace {

// Logits equal to the input (d = K = 3).
MlpModel identity_model() {
  return MlpModel({3, 3}, {Tensor({3, 3}, Vec{1, 0, 0, 0, 1, 0, 0, 0, 1})}, {Vec(3, 0.0)});
}

// Same class for every input.
MlpModel constant_model(std::size_t d) {
  return MlpModel({d, 3}, {Tensor({3, d}, 0.0)}, {Vec{0.0, 1.0, 0.0}});
}

std::vector<bool> random_mask(SeededRng& rng, std::size_t n) {
  std::vector<bool> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = rng.below(2) == 1;
  return m;
}

}  // namespace

TEST(Evaluate, AllWrongAndAllRight) {
  const MlpModel m = identity_model();
  Tensor x({2, 3}, Vec{0.9, 0.1, 0.0, 0.1, 0.2, 0.8});
  const std::vector<std::uint32_t> right{0, 2}, wrong{1, 1};
  EXPECT_EQ(evaluate(m, x, right).attack_success_rate, 0.0);
  EXPECT_EQ(evaluate(m, x, wrong).attack_success_rate, 1.0);
}

TEST(Evaluate, RecordsMatchIndependentPass) {
  const auto data = synth_dataset(SynthSpec{SynthKind::blobs, 90, 8, 4, 0.2, 3});
  const MlpModel m = MlpModel::random({8, 12, 4}, 3);
  Tensor shifted = data.inputs;
  for (auto& v : shifted.data()) v = std::min(1.0, v + 0.01);
  const auto report = evaluate(m, shifted, data.labels, &data.inputs);
  ASSERT_EQ(report.records.size(), data.size());
  double ce_sum = 0.0;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vec s = m.forward(shifted.row(i));
    const auto p = softmax(s);
    const auto& r = report.records[i];
    EXPECT_EQ(r.index, i);
    EXPECT_EQ(r.success, argmax(s) != data.labels[i]);
    EXPECT_EQ(r.ce_loss, ce_loss(s, data.labels[i]));
    EXPECT_EQ(r.p_y, p[data.labels[i]]);
    EXPECT_EQ(r.p_tau, p[label_info(p, data.labels[i]).tau]);
    EXPECT_EQ(r.linf_norm, norm_linf(subtract(shifted.row(i), data.inputs.row(i))));
    EXPECT_EQ(r.l2_norm, norm_l2(subtract(shifted.row(i), data.inputs.row(i))));
    ce_sum += r.ce_loss;
    wins += r.success;
  }
  EXPECT_EQ(report.attack_success_rate, static_cast<double>(wins) / data.size());
  EXPECT_NEAR(report.mean_ce_loss, ce_sum / data.size(), 1e-12);
  EXPECT_EQ(evaluate(m, shifted, data.labels, &data.inputs), report);  // idempotent
}

TEST(SetAnalysis, IdenticalMasks) {
  const std::vector<bool> a{true, false, true, true};
  const auto cmp = success_set_analysis({"x", "y"}, {a, a});
  const auto& p = cmp.pair("x", "y");
  EXPECT_EQ(p.a_minus_b, 0.0);
  EXPECT_EQ(p.b_minus_a, 0.0);
  EXPECT_EQ(p.intersection, 0.75);
}

TEST(SetAnalysis, CountingIdentitiesOnRandomMasks) {
  SeededRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    const std::vector<std::vector<bool>> masks{random_mask(rng, n), random_mask(rng, n),
                                               random_mask(rng, n)};
    const auto cmp = success_set_analysis({"a", "b", "c"}, masks);
    EXPECT_EQ(cmp.pairs.size(), 3u);
    for (const auto& p : cmp.pairs) {
      const auto& ma = masks[p.a[0] - 'a'];
      const auto& mb = masks[p.b[0] - 'a'];
      const auto count_a = static_cast<std::size_t>(std::count(ma.begin(), ma.end(), true));
      const auto count_b = static_cast<std::size_t>(std::count(mb.begin(), mb.end(), true));
      EXPECT_EQ(p.count_intersection + p.count_a_minus_b, count_a);
      EXPECT_EQ(p.count_intersection + p.count_b_minus_a, count_b);
      for (double v : {p.intersection, p.a_minus_b, p.b_minus_a}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
  EXPECT_THROW(success_set_analysis({"a", "b"}, {{true}, {true, false}}), ContractError);
}

TEST(SetAnalysis, MeanOverDifference) {
  const std::vector<bool> a{true, true, false, true}, b{false, true, false, false};
  EXPECT_DOUBLE_EQ(*mean_over_difference(a, b, {1.0, 100.0, 100.0, 3.0}), 2.0);
  EXPECT_FALSE(mean_over_difference(b, a, {1.0, 2.0, 3.0, 4.0}).has_value());
}

TEST(HighLoss, EmptySetReportsAbsentMeans) {
  const MlpModel m = identity_model();
  Tensor x({1, 3}, Vec{0.9, 0.1, 0.0});
  const std::vector<std::uint32_t> y{0};
  const auto r = high_loss_analysis(m, x, x, x, y);
  EXPECT_EQ(r.h_count, 0u);
  EXPECT_FALSE(r.mean_l1.has_value());
  EXPECT_EQ(r.sdm_fail_count, 0u);
  EXPECT_FALSE(r.mean_l2.has_value());
}

TEST(HighLoss, MeansOnlyOverH) {
  const MlpModel m = identity_model();
  // Example 0: PGD fails, baseline succeeds, SDM succeeds  -> in h.
  // Example 1: PGD fails, baseline succeeds, SDM fails     -> in h.
  // Example 2: PGD succeeds                                -> not in h.
  Tensor pgd({3, 3}, Vec{0.6, 0.5, 0.0, 0.7, 0.65, 0.0, 0.0, 0.9, 0.0});
  Tensor base({3, 3}, Vec{0.4, 0.6, 0.0, 0.3, 0.5, 0.0, 0.0, 0.1, 0.0});
  Tensor sdm({3, 3}, Vec{0.3, 0.7, 0.0, 0.8, 0.2, 0.0, 0.0, 0.9, 0.0});
  const std::vector<std::uint32_t> y{0, 0, 0};
  const auto r = high_loss_analysis(m, pgd, sdm, base, y);
  ASSERT_EQ(r.h_count, 2u);
  EXPECT_EQ(r.h, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.sdm_fail_count, 1u);
  auto ce = [&](const Tensor& t, std::size_t i) { return ce_loss(m.forward(t.row(i)), 0); };
  EXPECT_NEAR(*r.mean_l1, ((ce(pgd, 0) - ce(base, 0)) + (ce(pgd, 1) - ce(base, 1))) / 2, 1e-14);
  EXPECT_NEAR(*r.mean_l2, ((ce(sdm, 0) - ce(base, 0)) + (ce(sdm, 1) - ce(base, 1))) / 2, 1e-14);
  EXPECT_THROW(high_loss_analysis(m, pgd, sdm, Tensor({2, 3}), y), ContractError);
}

TEST(Interference, TranslatePixels) {
  EXPECT_EQ(translate_pixels(32, 0.125), 4u);
  EXPECT_EQ(translate_pixels(4, 0.125), 1u);   // 0.5 rounds away from zero
  EXPECT_EQ(translate_pixels(64, 0.125), 8u);
}

TEST(Interference, HflipInvolutionAndTranslateZeroFill) {
  const GridShape g{2, 3, 4};
  SeededRng rng(6);
  Vec x(g.size());
  for (auto& v : x) v = rng.uniform();
  EXPECT_EQ(hflip(hflip(x, g), g), x);
  EXPECT_EQ(hflip(x, g)[0], x[3]);

  const GridShape one{1, 3, 3};
  const Vec img{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(translate(img, one, ShiftDirection::right, 1), (Vec{0, 1, 2, 0, 4, 5, 0, 7, 8}));
  EXPECT_EQ(translate(img, one, ShiftDirection::left, 1), (Vec{2, 3, 0, 5, 6, 0, 8, 9, 0}));
  EXPECT_EQ(translate(img, one, ShiftDirection::down, 1), (Vec{0, 0, 0, 1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(translate(img, one, ShiftDirection::up, 1), (Vec{4, 5, 6, 7, 8, 9, 0, 0, 0}));
}

TEST(Interference, OutputsBoundedAndNoiseWithinInterval) {
  SeededRng rng(7);
  const GridShape g{3, 4, 4};
  Tensor x({50, g.size()});
  for (auto& v : x.data()) v = rng.uniform();
  for (auto kind : {InterferenceKind::hflip, InterferenceKind::translate,
                    InterferenceKind::uniform_noise, InterferenceKind::gaussian_noise}) {
    InterferenceSpec spec;
    spec.kind = kind;
    spec.seed = 3;
    const Tensor out = apply_interference(x, spec, g);
    for (double v : out.data()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    EXPECT_EQ(apply_interference(x, spec, g), out);
    if (kind == InterferenceKind::uniform_noise) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_LE(std::fabs(out.data()[i] - x.data()[i]), 0.15 + 1e-15);
      }
    }
  }
  InterferenceSpec flip;
  EXPECT_THROW(apply_interference(x, flip, GridShape{1, 1, g.size()}), ContractError);
  EXPECT_THROW(apply_interference(x, flip, std::nullopt), ContractError);
}

TEST(Interference, GaussianNoiseMoments) {
  Tensor x({400, 50}, 0.5);
  InterferenceSpec spec;
  spec.kind = InterferenceKind::gaussian_noise;
  const Tensor out = apply_interference(x, spec, std::nullopt);
  double s = 0, s2 = 0;
  for (double v : out.data()) {
    s += v - 0.5;
    s2 += (v - 0.5) * (v - 0.5);
  }
  const double n = static_cast<double>(out.size());
  EXPECT_NEAR(s / n, 0.0, 0.002);
  EXPECT_NEAR(std::sqrt(s2 / n), 0.05, 0.002);
}

TEST(Interference, SuiteConsistency) {
  const auto data = synth_dataset(SynthSpec{SynthKind::blobs, 60, 8, 3, 0.1, 1});
  const GridShape g{1, 2, 4};
  // A transform-invariant model: every column equals the clean rate.
  const auto flat = interference_suite(constant_model(8), "clean", data.inputs, data.labels, g, 0);
  for (double v : flat.asr) EXPECT_EQ(v, flat.asr[0]);
  const MlpModel m = MlpModel::random({8, 10, 3}, 2);
  const auto row = interference_suite(m, "pgd", data.inputs, data.labels, g, 4);
  EXPECT_EQ(row.asr[0], evaluate(m, data.inputs, data.labels).attack_success_rate);
  EXPECT_EQ(row.worst_case(), *std::min_element(row.asr.begin() + 1, row.asr.end()));
  const auto again = interference_suite(m, "pgd", data.inputs, data.labels, g, 4);
  EXPECT_EQ(row.asr, again.asr);
}

TEST(Pca, PlantedSubspace) {
  SeededRng rng(9);
  const std::size_t d = 12, m = 300;
  // Orthonormal plane spanned by u, v.
  Vec u(d), v(d);
  for (auto& e : u) e = rng.normal();
  for (auto& e : v) e = rng.normal();
  const double nu = norm_l2(u);
  for (auto& e : u) e /= nu;
  const double uv = dot(u, v);
  for (std::size_t i = 0; i < d; ++i) v[i] -= uv * u[i];
  const double nv = norm_l2(v);
  for (auto& e : v) e /= nv;
  Tensor x({m, d});
  for (std::size_t r = 0; r < m; ++r) {
    const double a = 3.0 * rng.normal(), b = 1.5 * rng.normal();
    for (std::size_t j = 0; j < d; ++j) x.at(r, j) = a * u[j] + b * v[j] + 1e-4 * rng.normal() + 0.2;
  }
  const auto res = pca_2d(x);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto comp = res.components.row(c);
    EXPECT_NEAR(norm_l2(comp), 1.0, 1e-8);
    // Residual of the component outside span(u, v) gives the principal angle.
    const double pu = dot(comp, u), pv = dot(comp, v);
    const double inside = std::sqrt(pu * pu + pv * pv);
    const double angle = std::acos(std::min(1.0, inside)) * 180.0 / std::numbers::pi;
    EXPECT_LT(angle, 1.0);
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::fabs(comp[j]) > std::fabs(comp[big])) big = j;
    }
    EXPECT_GT(comp[big], 0.0);
  }
  EXPECT_NEAR(dot(res.components.row(0), res.components.row(1)), 0.0, 1e-8);
}

TEST(Pca, MatchesFullEigendecomposition) {
  SeededRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 5, m = 40;
    Tensor x({m, d});
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < d; ++j) x.at(r, j) = rng.normal() * static_cast<double>(d - j);
    }
    const auto res = pca_2d(x);
    Eigen::MatrixXd a(m, d);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < d; ++j) a(r, j) = x.at(r, j);
    }
    const Eigen::MatrixXd centered = a.rowwise() - a.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::MatrixXd top = es.eigenvectors().rightCols(2);  // ascending order
    const Eigen::MatrixXd proj = centered * top;
    EXPECT_NEAR(res.eigenvalues[0], es.eigenvalues()(d - 1), 1e-8 * es.eigenvalues()(d - 1));
    EXPECT_NEAR(res.eigenvalues[1], es.eigenvalues()(d - 2), 1e-8 * es.eigenvalues()(d - 1));
    // Pairwise distances in the plane are invariant to the basis sign choice.
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; j += 7) {
        const double dx = res.coords.at(i, 0) - res.coords.at(j, 0);
        const double dy = res.coords.at(i, 1) - res.coords.at(j, 1);
        const double ours = std::sqrt(dx * dx + dy * dy);
        const double theirs = (proj.row(i) - proj.row(j)).norm();
        EXPECT_NEAR(ours, theirs, 1e-8);
      }
    }
  }
}

TEST(Pca, DegenerateInputs) {
  // Two distinct points repeated: rank one.
  Tensor pair({4, 3}, Vec{0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1});
  EXPECT_THROW(pca_2d(pair), DegenerateSubspaceError);
  EXPECT_THROW(pca_2d(Tensor({5, 3}, 0.5)), DegenerateSubspaceError);
  EXPECT_THROW(pca_2d(Tensor({2, 3}, Vec{0, 1, 2, 3, 4, 5})), ContractError);
}

TEST(Idw, ExactAtSamplesAndBounded) {
  SeededRng rng(11);
  Tensor pts({60, 2});
  Vec vals(60);
  for (std::size_t i = 0; i < 60; ++i) {
    pts.at(i, 0) = rng.uniform(-1, 1);
    pts.at(i, 1) = rng.uniform(-1, 1);
    vals[i] = rng.uniform(-2, 5);
  }
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  for (std::size_t i = 0; i < 60; ++i) {
    EXPECT_EQ(idw_interpolate(pts, vals, pts.at(i, 0), pts.at(i, 1)), vals[i]);
  }
  for (int q = 0; q < 500; ++q) {
    const double v = idw_interpolate(pts, vals, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    EXPECT_GE(v, *lo - 1e-12);
    EXPECT_LE(v, *hi + 1e-12);
  }
}

TEST(Idw, LocalityWhenOneSampleIsMuchCloser) {
  // With power 2 and k neighbours, a sample r times closer than all others
  // carries weight at least r^2 / (r^2 + k - 1); the estimate therefore lies
  // within (k-1)/(r^2+k-1) * range of that sample's value.
  SeededRng rng(12);
  Tensor pts({40, 2});
  Vec vals(40);
  for (std::size_t i = 0; i < 40; ++i) {
    pts.at(i, 0) = rng.uniform(1, 2) * (rng.below(2) ? 1 : -1);
    pts.at(i, 1) = rng.uniform(1, 2) * (rng.below(2) ? 1 : -1);
    vals[i] = rng.uniform(0, 1);
  }
  pts.at(0, 0) = 0.05;
  pts.at(0, 1) = 0.0;
  vals[0] = 0.3;
  const double r = 1.0 / 0.05;  // others are at distance >= 1
  const double bound = 15.0 / (r * r + 15.0);
  EXPECT_LE(std::fabs(idw_interpolate(pts, vals, 0.0, 0.0) - 0.3), bound);
}

TEST(Landscape, GridShapeAndBounds) {
  const MlpModel m = MlpModel::random({6, 12, 3}, 1);
  const Vec x{0.2, 0.4, 0.6, 0.8, 0.5, 0.3};
  LandscapeOptions opts;
  opts.samples = 80;
  opts.resolution = 16;
  const auto grid = landscape(m, x, 1, 0.1, opts);
  EXPECT_EQ(grid.p_y.rows(), 16u);
  EXPECT_EQ(grid.p_y.cols(), 16u);
  EXPECT_EQ(grid.sample_coords.rows(), 80u);
  const auto [ylo, yhi] = std::minmax_element(grid.sample_p_y.begin(), grid.sample_p_y.end());
  const auto [dlo, dhi] = std::minmax_element(grid.sample_p_diff.begin(), grid.sample_p_diff.end());
  for (double v : grid.p_y.data()) {
    EXPECT_GE(v, *ylo - 1e-12);
    EXPECT_LE(v, *yhi + 1e-12);
  }
  for (double v : grid.p_diff.data()) {
    EXPECT_GE(v, *dlo - 1e-12);
    EXPECT_LE(v, *dhi + 1e-12);
  }
  std::ostringstream csv;
  write_landscape_csv(csv, grid);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "px,py,p_y,p_diff");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 256u);
}

TEST(Landscape, ZeroBudgetIsDegenerate) {
  const MlpModel m = MlpModel::random({4, 6, 3}, 1);
  LandscapeOptions opts;
  opts.samples = 50;
  opts.resolution = 8;
  EXPECT_THROW(landscape(m, Vec{0.1, 0.2, 0.3, 0.4}, 0, 0.0, opts), DegenerateSubspaceError);
  opts.samples = 10;
  EXPECT_THROW(landscape(m, Vec{0.1, 0.2, 0.3, 0.4}, 0, 0.1, opts), ContractError);
}

TEST(Timing, RowsPerMethodAndRepeatContract) {
  const auto data = synth_dataset(SynthSpec{SynthKind::blobs, 32, 8, 5, 0.1, 1});
  const MlpModel m = MlpModel::random({8, 32, 5}, 1);
  AttackConfig a;
  a.method = AttackMethod::pgd;
  a.epsilon = 0.1;
  a.alpha = 0.02;
  a.total_steps = 10;
  AttackConfig b = a;
  b.method = AttackMethod::sdm;
  const auto rows = timing_bench(m, data, {a, b}, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].method, "pgd");
  EXPECT_EQ(rows[1].method, "sdm");
  for (const auto& r : rows) {
    EXPECT_EQ(r.samples_ms.size(), 3u);
    EXPECT_GT(r.mean_ms, 0.0);
  }
  EXPECT_THROW(timing_bench(m, data, {a}, 2), ContractError);
}

TEST(ReportIo, JsonLinesRoundTrip) {
  const auto data = synth_dataset(SynthSpec{SynthKind::blobs, 25, 8, 3, 0.1, 1});
  const MlpModel m = MlpModel::random({8, 8, 3}, 1);
  const auto report = evaluate(m, data.inputs, data.labels, &data.inputs);
  std::stringstream ss;
  write_report_jsonl(ss, report);
  std::size_t lines = 0;
  for (std::string l; std::getline(ss, l);) ++lines;
  EXPECT_EQ(lines, 26u);
  ss.clear();
  ss.seekg(0);
  EXPECT_EQ(read_report_jsonl(ss), report);
  std::istringstream bad("{\"index\":0}\nnot json\n");
  EXPECT_THROW(read_report_jsonl(bad), FormatError);
}
