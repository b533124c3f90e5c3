#include "network.hpp"

#include <cmath>

#include "alexbench/error.hpp"

namespace alexbench::model::detail {
namespace {

using Eigen::Index;
using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index ix(std::size_t v) { return static_cast<Index>(v); }

}  // namespace

Layout layout(const Architecture& arch) {
  Layout l;
  std::size_t off = 0;
  if (arch.kind == ArchKind::Conv) {
    l.conv_w = off;
    off += arch.filters * arch.kernel * arch.kernel;
    l.conv_b = off;
    off += arch.filters;
  }
  l.w1 = off;
  off += arch.hidden * arch.feature_dim();
  l.b1 = off;
  off += arch.hidden;
  l.w2 = off;
  off += arch.classes * arch.hidden;
  l.b2 = off;
  off += arch.classes;
  l.total = off;
  return l;
}

MatrixXd im2col(const Architecture& arch, const Eigen::Ref<const VectorXd>& image) {
  const std::size_t k = arch.kernel;
  const std::size_t out_rows = arch.conv_rows();
  const std::size_t out_cols = arch.conv_cols();
  MatrixXd patches(ix(k * k), ix(out_rows * out_cols));
  for (std::size_t r = 0; r < out_rows; ++r) {
    for (std::size_t c = 0; c < out_cols; ++c) {
      const Index pos = ix(r * out_cols + c);
      for (std::size_t dr = 0; dr < k; ++dr) {
        for (std::size_t dc = 0; dc < k; ++dc) {
          patches(ix(dr * k + dc), pos) = image[ix((r + dr) * arch.image_cols + c + dc)];
        }
      }
    }
  }
  return patches;
}

Activations forward(const Architecture& arch, const VectorXd& params, const MatrixXd& inputs,
                    bool keep_conv_pre) {
  if (static_cast<std::size_t>(inputs.rows()) != arch.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(inputs.rows()) +
                                                  " rows, architecture expects " +
                                                  std::to_string(arch.input_dim()));
  }
  const Layout l = layout(arch);
  const double* p = params.data();
  const Index batch = inputs.cols();
  Activations a;

  if (arch.kind == ArchKind::Conv) {
    const Index filters = ix(arch.filters);
    const Index positions = ix(arch.conv_positions());
    Map<const MatrixXd> kernel(p + l.conv_w, filters, ix(arch.kernel * arch.kernel));
    Map<const VectorXd> kernel_bias(p + l.conv_b, filters);
    a.features.resize(filters * positions, batch);
    if (keep_conv_pre) a.conv_pre.resize(filters * positions, batch);
    for (Index j = 0; j < batch; ++j) {
      MatrixXd pre = kernel * im2col(arch, inputs.col(j));
      pre.colwise() += kernel_bias;
      if (keep_conv_pre) a.conv_pre.col(j) = pre.reshaped();
      a.features.col(j) = pre.reshaped().cwiseMax(0.0);
    }
  } else {
    a.features = inputs;
  }

  Map<const MatrixXd> w1(p + l.w1, ix(arch.hidden), ix(arch.feature_dim()));
  Map<const VectorXd> b1(p + l.b1, ix(arch.hidden));
  Map<const MatrixXd> w2(p + l.w2, ix(arch.classes), ix(arch.hidden));
  Map<const VectorXd> b2(p + l.b2, ix(arch.classes));

  a.hidden_pre.noalias() = w1 * a.features;
  a.hidden_pre.colwise() += b1;
  a.hidden = a.hidden_pre.cwiseMax(0.0);
  a.logits.noalias() = w2 * a.hidden;
  a.logits.colwise() += b2;
  return a;
}

double cross_entropy(const MatrixXd& logits, std::span<const std::uint8_t> labels) {
  double total = 0.0;
  for (Index j = 0; j < logits.cols(); ++j) {
    const double m = logits.col(j).maxCoeff();
    const double lse = m + std::log((logits.col(j).array() - m).exp().sum());
    total += lse - logits(labels[static_cast<std::size_t>(j)], j);
  }
  return total / static_cast<double>(logits.cols());
}

double backward(const Architecture& arch, const VectorXd& params, const MatrixXd& inputs,
                std::span<const std::uint8_t> labels, VectorXd& grad) {
  if (inputs.cols() == 0) throw Error(ErrorCode::EmptyBatch, "loss_and_grad on empty batch");
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from batch size");
  }
  for (std::uint8_t y : labels) {
    if (y >= arch.classes) throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(y));
  }
  const Layout l = layout(arch);
  const Activations a = forward(arch, params, inputs, /*keep_conv_pre=*/true);
  const Index batch = inputs.cols();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const double* p = params.data();

  grad.setZero(ix(l.total));
  double* g = grad.data();

  // d(loss)/d(logits) = (softmax - onehot) / B
  MatrixXd d_logits(a.logits.rows(), batch);
  for (Index j = 0; j < batch; ++j) {
    const double m = a.logits.col(j).maxCoeff();
    VectorXd e = (a.logits.col(j).array() - m).exp();
    d_logits.col(j) = e / e.sum();
    d_logits(labels[static_cast<std::size_t>(j)], j) -= 1.0;
  }
  d_logits *= inv_batch;
  const double loss = cross_entropy(a.logits, labels);

  Map<const MatrixXd> w1(p + l.w1, ix(arch.hidden), ix(arch.feature_dim()));
  Map<const MatrixXd> w2(p + l.w2, ix(arch.classes), ix(arch.hidden));
  Map<MatrixXd> g_w1(g + l.w1, ix(arch.hidden), ix(arch.feature_dim()));
  Map<VectorXd> g_b1(g + l.b1, ix(arch.hidden));
  Map<MatrixXd> g_w2(g + l.w2, ix(arch.classes), ix(arch.hidden));
  Map<VectorXd> g_b2(g + l.b2, ix(arch.classes));

  g_w2.noalias() = d_logits * a.hidden.transpose();
  g_b2 = d_logits.rowwise().sum();

  MatrixXd d_hidden = (w2.transpose() * d_logits).cwiseProduct(
      (a.hidden_pre.array() > 0.0).cast<double>().matrix());
  g_w1.noalias() = d_hidden * a.features.transpose();
  g_b1 = d_hidden.rowwise().sum();

  if (arch.kind == ArchKind::Conv) {
    const Index filters = ix(arch.filters);
    const Index positions = ix(arch.conv_positions());
    Map<MatrixXd> g_kernel(g + l.conv_w, filters, ix(arch.kernel * arch.kernel));
    Map<VectorXd> g_kernel_bias(g + l.conv_b, filters);
    const MatrixXd d_features = w1.transpose() * d_hidden;
    for (Index j = 0; j < batch; ++j) {
      MatrixXd d_pre = d_features.col(j).reshaped(filters, positions);
      d_pre.array() *= (a.conv_pre.col(j).reshaped(filters, positions).array() > 0.0).cast<double>();
      g_kernel.noalias() += d_pre * im2col(arch, inputs.col(j)).transpose();
      g_kernel_bias += d_pre.rowwise().sum();
    }
  }
  return loss;
}

}  // namespace alexbench::model::detail
