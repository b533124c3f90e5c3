#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "alexbench/data/dataset.hpp"
#include "alexbench/error.hpp"
#include "alexbench/model/classifier.hpp"
#include "alexbench/model/train.hpp"
#include "support/testing.hpp"

using namespace alexbench;
using namespace alexbench::model;
using testing_support::TempDir;

namespace {

Architecture small_conv() {
  Architecture a = Architecture::conv(6, 5);
  a.filters = 3;
  a.hidden = 4;
  a.classes = 3;
  return a;
}

Architecture small_dense() {
  Architecture a = Architecture::dense(4, 4);
  a.hidden = 5;
  a.classes = 3;
  return a;
}

Eigen::VectorXd random_params(const Architecture& a, std::mt19937_64& rng, double scale = 0.5) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXd p(static_cast<Eigen::Index>(a.parameter_count()));
  for (auto& v : p) v = n(rng);
  return p;
}

Eigen::MatrixXd random_inputs(std::size_t d, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (auto& v : x.reshaped()) v = u(rng);
  return x;
}

// Loop-level forward pass written from the layout description: kernel
// filters x k*k, conv features filter-major within each position, dense
// weights column-major (rows = outputs).
std::vector<double> naive_logits(const Architecture& a, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  std::size_t off = 0;
  std::vector<double> feat;
  if (a.kind == ArchKind::Conv) {
    const std::size_t F = a.filters, K = a.kernel, R = a.conv_rows(), C = a.conv_cols();
    const std::size_t kw = off;
    off += F * K * K;
    const std::size_t kb = off;
    off += F;
    feat.assign(F * R * C, 0.0);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t f = 0; f < F; ++f) {
          double s = p[kb + f];
          for (std::size_t dr = 0; dr < K; ++dr)
            for (std::size_t dc = 0; dc < K; ++dc)
              s += p[kw + f + F * (dr * K + dc)] * x[(r + dr) * a.image_cols + c + dc];
          feat[f + F * (r * C + c)] = std::max(0.0, s);
        }
  } else {
    feat.assign(x.data(), x.data() + x.size());
  }
  const std::size_t H = a.hidden, D = feat.size(), L = a.classes;
  std::vector<double> h(H);
  for (std::size_t i = 0; i < H; ++i) {
    double s = p[off + H * D + i];
    for (std::size_t j = 0; j < D; ++j) s += p[off + i + H * j] * feat[j];
    h[i] = std::max(0.0, s);
  }
  off += H * D + H;
  std::vector<double> z(L);
  for (std::size_t c = 0; c < L; ++c) {
    double s = p[off + L * H + c];
    for (std::size_t i = 0; i < H; ++i) s += p[off + c + L * i] * h[i];
    z[c] = s;
  }
  return z;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(Architecture::dense().parameter_count() == 784 * 128 + 128 + 128 * 10 + 10);
  CHECK(Architecture::dense().parameter_count() == 101770);
  // 3x3x32 conv with bias, 26*26*32 features into 128 hidden, then 10 outputs.
  CHECK(Architecture::conv().parameter_count() == (9 * 32 + 32) + (26 * 26 * 32 * 128 + 128) + (128 * 10 + 10));
  CHECK(init_model(Architecture::dense(), 1).parameters().size() == 101770);
}

TEST_CASE("architecture descriptor round trip and validation") {
  for (const auto& a : {Architecture::dense(), Architecture::conv(), small_conv()}) {
    CHECK(Architecture::parse(a.descriptor()) == a);
  }
  Architecture bad = Architecture::conv(2, 2);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(Architecture::parse("mlp rows=28"), Error);
  CHECK_THROWS_AS(init_model(bad, 0), Error);
}

TEST_CASE("init is deterministic and starts uniform") {
  const auto a = init_model(Architecture::dense(), 42);
  const auto b = init_model(Architecture::dense(), 42);
  const auto c = init_model(Architecture::dense(), 43);
  CHECK(a.parameters() == b.parameters());
  CHECK(a.parameters() != c.parameters());
  std::mt19937_64 rng(1);
  const auto p = a.predict(random_inputs(784, 5, rng));
  for (auto v : p.reshaped()) CHECK(v == 0.1);
  const auto conv = init_model(small_conv(), 3);
  const auto q = conv.predict(random_inputs(30, 3, rng));
  for (auto v : q.reshaped()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("init respects the fan-in limit") {
  const auto m = init_model(Architecture::dense(), 5);
  const double limit = std::sqrt(6.0 / 784.0);
  const auto& p = m.parameters();
  CHECK(p.head(784 * 128).cwiseAbs().maxCoeff() <= limit);
  CHECK(p.head(784 * 128).cwiseAbs().maxCoeff() > 0.9 * limit);
  CHECK(p.tail(128 + 1280 + 10).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass agrees with a loop-level implementation") {
  std::mt19937_64 rng(17);
  for (const auto& arch : {small_conv(), small_dense()}) {
    const ClassifierModel m(arch, random_params(arch, rng), 0);
    const auto x = random_inputs(arch.input_dim(), 4, rng);
    const auto z = m.logits(x);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const auto ref = naive_logits(arch, m.parameters(), x.col(j));
      for (std::size_t c = 0; c < ref.size(); ++c) CHECK(z(static_cast<Eigen::Index>(c), j) == doctest::Approx(ref[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("posterior is a point on the simplex") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto arch = t % 2 ? small_conv() : small_dense();
    const ClassifierModel m(arch, random_params(arch, rng, 3.0), 0);
    const auto p = m.predict(random_inputs(arch.input_dim(), 6, rng));
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      CHECK(p.col(j).minCoeff() >= 0.0);
      CHECK(std::abs(p.col(j).sum() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("softmax shift invariance and a hand-set logit") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd z = random_inputs(10, 8, rng) * 20.0;
  const Eigen::MatrixXd shifted = z.array() + 123.456;
  CHECK((softmax(z) - softmax(shifted)).cwiseAbs().maxCoeff() < 1e-9);

  auto m = init_model(Architecture::dense(), 1);
  m.parameters().tail(10).setZero();
  m.parameters()[m.parameters().size() - 10] = 1.0;
  data::FeatureVector x{std::vector<double>(784, 0.3), 0};
  const auto post = predict_posterior(m, x);
  CHECK(post.probs[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 9.0)).epsilon(1e-12));
  CHECK(post.probs[0] == doctest::Approx(0.2320).epsilon(1e-4));
  CHECK(post.argmax() == 0);

  data::FeatureVector wrong{std::vector<double>(783, 0.0), 0};
  try {
    predict_posterior(m, wrong);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("score functions") {
  const std::vector<double> uniform(10, 0.1);
  std::vector<double> onehot(10, 0.0);
  onehot[3] = 1.0;
  const std::vector<double> mixed{0.5, 0.3, 0.2, 0, 0, 0, 0, 0, 0, 0};
  CHECK(uncertainty_score(uniform) == 0.1);
  CHECK(uncertainty_score(onehot) == 1.0);
  CHECK(uncertainty_score(mixed) == 0.5);
  CHECK(margin_score(uniform) == 0.0);
  CHECK(margin_score(onehot) == 1.0);
  CHECK(margin_score(mixed) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("loss and gradient basics") {
  std::mt19937_64 rng(4);
  const auto arch = small_dense();
  const ClassifierModel m(arch, random_params(arch, rng), 0);
  const auto x = random_inputs(arch.input_dim(), 5, rng);
  const std::vector<std::uint8_t> y{0, 2, 1, 1, 0};
  const auto lg = loss_and_grad(m, x, y);
  CHECK(lg.grad.size() == static_cast<Eigen::Index>(arch.parameter_count()));
  CHECK(lg.loss == doctest::Approx(mean_loss(m, x, y)).epsilon(1e-14));

  Eigen::MatrixXd xx(x.rows(), 10);
  xx << x, x;
  std::vector<std::uint8_t> yy = y;
  yy.insert(yy.end(), y.begin(), y.end());
  const auto dup = loss_and_grad(m, xx, yy);
  CHECK(dup.loss == doctest::Approx(lg.loss).epsilon(1e-14));
  CHECK((dup.grad - lg.grad).cwiseAbs().maxCoeff() < 1e-14);

  try {
    loss_and_grad(m, Eigen::MatrixXd(arch.input_dim(), 0), {});
    FAIL("expected EmptyBatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBatch);
  }
}

TEST_CASE("confident correct prediction sits at the optimum") {
  auto m = init_model(small_dense(), 1);
  auto& p = m.parameters();
  p.setZero();
  p[p.size() - 3 + 2] = 40.0;  // bias of class 2
  std::mt19937_64 rng(5);
  const auto x = random_inputs(16, 3, rng);
  const auto lg = loss_and_grad(m, x, std::vector<std::uint8_t>{2, 2, 2});
  CHECK(lg.loss < 1e-6);
  CHECK(lg.grad.norm() < 1e-4);
}

TEST_CASE("finite differences at smooth points") {
  std::mt19937_64 rng(6);
  for (const auto& arch : {small_dense(), small_conv()}) {
    // Resample until every pre-activation is at least 1e-3 from the kink.
    ClassifierModel m(arch, random_params(arch, rng), 0);
    auto x = random_inputs(arch.input_dim(), 3, rng);
    for (int tries = 0; rectifier_gap(m, x) <= 1e-3 && tries < 100; ++tries) {
      m = ClassifierModel(arch, random_params(arch, rng), 0);
      x = random_inputs(arch.input_dim(), 3, rng);
    }
    const std::vector<std::uint8_t> y{0, 1, 2};
    REQUIRE(rectifier_gap(m, x) > 1e-3);
    const auto g = loss_and_grad(m, x, y).grad;
    const double h = 1e-4;
    for (Eigen::Index i = 0; i < m.parameters().size(); ++i) {
      const double keep = m.parameters()[i];
      m.parameters()[i] = keep + h;
      const double up = mean_loss(m, x, y);
      m.parameters()[i] = keep - h;
      const double down = mean_loss(m, x, y);
      m.parameters()[i] = keep;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-6 + 1e-4 * std::abs(g[i]));
    }
  }
}

TEST_CASE("model checkpoint round trip") {
  TempDir dir("model");
  std::mt19937_64 rng(7);
  const auto arch = small_conv();
  const ClassifierModel m(arch, random_params(arch, rng), 99);
  save_model(m, dir.path / "m.bin");
  const auto back = load_model(dir.path / "m.bin");
  CHECK(back.architecture() == arch);
  CHECK(back.init_seed() == 99);
  CHECK((back.parameters() - m.parameters().cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);

  std::ofstream(dir.path / "bad.bin") << "alexbench-model dense rows=4\n";
  CHECK_THROWS_AS(load_model(dir.path / "bad.bin"), Error);
  CHECK_THROWS_AS(save_model(m, ""), Error);
}

TEST_CASE("training reduces loss and is deterministic") {
  const auto train_split = data::load_split(testing_support::fixture("data/mnist"), data::Split::Train);
  auto images = std::make_shared<const data::ImageTensor>(train_split.images);
  const data::FeatureTable table(images);
  std::vector<data::LabeledEntry> entries;
  for (data::SourceIndex i = 0; i < 100; ++i) entries.push_back({i, train_split.labels[i]});
  const data::LabeledPool pool(entries);
  const auto x = table.gather(pool.indices());
  std::vector<std::uint8_t> y;
  for (const auto& e : pool.entries()) y.push_back(e.label);

  const auto init = init_model(Architecture::dense(), 11);
  TrainConfig one;
  one.epochs = 1;
  const auto after = train(init, pool, table, one, 5);
  CHECK(mean_loss(after, x, y) <= mean_loss(init, x, y) + 1e-3);
  CHECK(mean_loss(after, x, y) < mean_loss(init, x, y));

  TrainConfig cfg;
  cfg.epochs = 3;
  CHECK(train(init, pool, table, cfg, 5).parameters() == train(init, pool, table, cfg, 5).parameters());
  CHECK(train(init, pool, table, cfg, 5).parameters() != train(init, pool, table, cfg, 6).parameters());

  TrainConfig zero;
  zero.epochs = 0;
  CHECK(train(init, pool, table, zero, 5).parameters() == init.parameters());

  try {
    train(init, data::LabeledPool{}, table, cfg, 1);
    FAIL("expected EmptyPool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPool);
  }
}

TEST_CASE("a single instance is memorised") {
  for (const auto& arch : {Architecture::dense(), Architecture::conv()}) {
    const auto train_split = data::load_split(testing_support::fixture("data/mnist"), data::Split::Train);
    auto images = std::make_shared<const data::ImageTensor>(train_split.images);
    const data::FeatureTable table(images);
    const data::LabeledPool pool({{3, train_split.labels[3]}});
    TrainConfig cfg;
    cfg.epochs = 200;
    const auto m = train(init_model(arch, 2), pool, table, cfg, 1);
    const auto x = table.gather(pool.indices());
    CHECK(mean_loss(m, x, std::vector<std::uint8_t>{train_split.labels[3]}) < 0.01);
    data::FeatureVector fv = data::feature_vector(train_split.images, 3);
    CHECK(predict_posterior(m, fv).argmax() == train_split.labels[3]);
  }
}
