#include "mpcac/linalg.hpp"

namespace mpcac {

Mat null_space(const Eigen::Ref<const Mat>& A, Index cols, double threshold) {
  if (A.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s[rank] > threshold) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

Mat vstack(const Eigen::Ref<const Mat>& top, const Eigen::Ref<const Mat>& bottom) {
  const Index cols = top.rows() > 0 ? top.cols() : bottom.cols();
  Mat out(top.rows() + bottom.rows(), cols);
  if (top.rows() > 0) out.topRows(top.rows()) = top;
  if (bottom.rows() > 0) out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace mpcac
