#pragma once

// Internal: parameter layout and forward/backward passes shared by the
// classifier and the trainer.

#include <Eigen/Core>

#include <cstdint>
#include <span>

#include "alexbench/model/architecture.hpp"

namespace alexbench::model::detail {

struct Layout {
  std::size_t conv_w = 0, conv_b = 0, w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
};

Layout layout(const Architecture& arch);

struct Activations {
  Eigen::MatrixXd conv_pre;    // filters*positions x B (conv only)
  Eigen::MatrixXd features;    // input to the hidden layer
  Eigen::MatrixXd hidden_pre;  // hidden x B
  Eigen::MatrixXd hidden;      // hidden x B
  Eigen::MatrixXd logits;      // classes x B
};

// k*k x positions patch matrix for one image.
Eigen::MatrixXd im2col(const Architecture& arch, const Eigen::Ref<const Eigen::VectorXd>& image);

Activations forward(const Architecture& arch, const Eigen::VectorXd& params, const Eigen::MatrixXd& inputs,
                    bool keep_conv_pre);

// Mean cross-entropy; fills `grad` (resized to the parameter count).
double backward(const Architecture& arch, const Eigen::VectorXd& params, const Eigen::MatrixXd& inputs,
                std::span<const std::uint8_t> labels, Eigen::VectorXd& grad);

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels);

}  // namespace alexbench::model::detail
