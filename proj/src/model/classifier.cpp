#include "alexbench/model/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "alexbench/error.hpp"
#include "alexbench/random.hpp"
#include "network.hpp"

namespace alexbench::model {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::size_t Posterior::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

ClassifierModel::ClassifierModel(Architecture arch, VectorXd parameters, std::uint64_t init_seed)
    : arch_(std::move(arch)), params_(std::move(parameters)), init_seed_(init_seed) {
  arch_.validate();
  if (static_cast<std::size_t>(params_.size()) != arch_.parameter_count()) {
    throw Error(ErrorCode::UnsupportedArchitecture,
                "parameter vector has " + std::to_string(params_.size()) + " entries, " +
                    arch_.descriptor() + " needs " + std::to_string(arch_.parameter_count()));
  }
}

MatrixXd ClassifierModel::logits(const MatrixXd& inputs) const {
  return detail::forward(arch_, params_, inputs, false).logits;
}

MatrixXd ClassifierModel::predict(const MatrixXd& inputs) const { return softmax(logits(inputs)); }

ClassifierModel init_model(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  const detail::Layout l = detail::layout(arch);
  VectorXd params = VectorXd::Zero(static_cast<Index>(l.total));
  Rng rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params[static_cast<Index>(offset + i)] = u(rng);
  };
  if (arch.kind == ArchKind::Conv) {
    fill(l.conv_w, arch.filters * arch.kernel * arch.kernel, arch.kernel * arch.kernel);
  }
  fill(l.w1, arch.hidden * arch.feature_dim(), arch.feature_dim());
  return ClassifierModel(arch, std::move(params), seed);
}

MatrixXd softmax(const MatrixXd& logits) {
  MatrixXd out(logits.rows(), logits.cols());
  for (Index j = 0; j < logits.cols(); ++j) {
    const double m = logits.col(j).maxCoeff();
    VectorXd e = (logits.col(j).array() - m).exp();
    out.col(j) = e / e.sum();
  }
  return out;
}

Posterior predict_posterior(const PosteriorModel& model, const data::FeatureVector& x) {
  if (x.values.size() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature vector has " + std::to_string(x.values.size()) +
                                                  " entries, model expects " +
                                                  std::to_string(model.input_dim()));
  }
  const MatrixXd in = Eigen::Map<const VectorXd>(x.values.data(), static_cast<Index>(x.values.size()));
  const MatrixXd p = model.predict(in);
  return Posterior{{p.data(), p.data() + p.rows()}};
}

MatrixXd predict_indices(const PosteriorModel& model, const data::FeatureTable& table,
                         std::span<const data::SourceIndex> indices) {
  if (table.dim() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature table width differs from model input");
  }
  MatrixXd out(static_cast<Index>(model.num_classes()), static_cast<Index>(indices.size()));
  std::size_t chunk = 1024;
  if (const auto* c = dynamic_cast<const ClassifierModel*>(&model)) {
    chunk = std::clamp<std::size_t>((std::size_t{1} << 23) / c->architecture().feature_dim(), 16, 4096);
  }
  for (std::size_t start = 0; start < indices.size(); start += chunk) {
    const std::size_t n = std::min(chunk, indices.size() - start);
    out.middleCols(static_cast<Index>(start), static_cast<Index>(n)) =
        model.predict(table.gather(indices.subspan(start, n)));
  }
  return out;
}

LossGrad loss_and_grad(const ClassifierModel& model, const MatrixXd& inputs,
                       std::span<const std::uint8_t> labels) {
  LossGrad out;
  out.loss = detail::backward(model.architecture(), model.parameters(), inputs, labels, out.grad);
  return out;
}

double mean_loss(const ClassifierModel& model, const MatrixXd& inputs, std::span<const std::uint8_t> labels) {
  if (inputs.cols() == 0) throw Error(ErrorCode::EmptyBatch, "mean_loss on empty batch");
  return detail::cross_entropy(model.logits(inputs), labels);
}

std::vector<std::uint8_t> rectifier_pattern(const ClassifierModel& model, const MatrixXd& inputs) {
  const auto a = detail::forward(model.architecture(), model.parameters(), inputs, true);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(a.conv_pre.size() + a.hidden_pre.size()));
  for (Index i = 0; i < a.conv_pre.size(); ++i) out.push_back(a.conv_pre.data()[i] > 0.0);
  for (Index i = 0; i < a.hidden_pre.size(); ++i) out.push_back(a.hidden_pre.data()[i] > 0.0);
  return out;
}

double rectifier_gap(const ClassifierModel& model, const MatrixXd& inputs) {
  const auto a = detail::forward(model.architecture(), model.parameters(), inputs, true);
  double gap = std::numeric_limits<double>::infinity();
  if (a.conv_pre.size() > 0) gap = a.conv_pre.cwiseAbs().minCoeff();
  return std::min(gap, a.hidden_pre.cwiseAbs().minCoeff());
}

double uncertainty_score(std::span<const double> posterior) {
  return *std::max_element(posterior.begin(), posterior.end());
}

double margin_score(std::span<const double> posterior) {
  double top1 = -1.0, top2 = -1.0;
  for (double v : posterior) {
    if (v > top1) {
      top2 = top1;
      top1 = v;
    } else if (v > top2) {
      top2 = v;
    }
  }
  return top1 - top2;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  if (path.empty()) throw Error(ErrorCode::IoError, "empty checkpoint path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "alexbench-model " << model.architecture().descriptor() << " seed=" << model.init_seed()
      << '\n';
  const VectorXd& p = model.parameters();
  std::vector<char> blob(static_cast<std::size_t>(p.size()) * 4);
  for (Index i = 0; i < p.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(p[i]));
    for (int b = 0; b < 4; ++b) blob[static_cast<std::size_t>(i) * 4 + b] = static_cast<char>(bits >> (8 * b));
  }
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  constexpr std::string_view kPrefix = "alexbench-model ";
  const auto seed_pos = line.rfind(" seed=");
  if (!line.starts_with(kPrefix) || seed_pos == std::string::npos) {
    throw Error(ErrorCode::CorruptCheckpoint, "bad model header in " + path.string());
  }
  const Architecture arch =
      Architecture::parse(line.substr(kPrefix.size(), seed_pos - kPrefix.size()));
  const std::uint64_t seed = std::stoull(line.substr(seed_pos + 6));
  std::vector<unsigned char> blob(arch.parameter_count() * 4);
  in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  if (static_cast<std::size_t>(in.gcount()) != blob.size() || in.peek() != EOF) {
    throw Error(ErrorCode::CorruptCheckpoint, "parameter blob size mismatch in " + path.string());
  }
  VectorXd params(static_cast<Index>(arch.parameter_count()));
  for (Index i = 0; i < params.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= std::uint32_t{blob[static_cast<std::size_t>(i) * 4 + b]} << (8 * b);
    params[i] = std::bit_cast<float>(bits);
  }
  return ClassifierModel(arch, std::move(params), seed);
}

}  // namespace alexbench::model
