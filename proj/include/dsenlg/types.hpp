#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace dsenlg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Binary class tag; minority is always the positive class.
enum class Label : std::uint8_t { Minority = 0, Majority = 1 };

using LabelVector = std::vector<Label>;

inline constexpr int kDefaultNeighbors = 3;
inline constexpr int kDefaultLayers = 3;

}  // namespace dsenlg
