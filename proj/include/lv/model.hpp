#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/error.hpp"
#include "lv/features.hpp"

namespace lv {

enum class ModelKind : std::uint32_t {
  Majority = 1,
  Tree = 2,
  Svm = 3,
  Knn = 4,
  Lda = 5,
  Ensemble = 6,
  SubspaceKnn = 7,
  Ann = 8,
};

// Little-endian blob stream used by the model container.
class BlobWriter {
 public:
  void u32(std::uint32_t v) { detail::put_le<std::uint32_t>(buf_, v); }
  void u64(std::uint64_t v) { detail::put_le<std::uint64_t>(buf_, v); }
  void f64(double v) { detail::put_le<double>(buf_, v); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

  void vec(const Vector& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void mat(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  template <typename T>
  void ints(const std::vector<T>& v) {
    u64(v.size());
    for (T x : v) u64(static_cast<std::uint64_t>(x));
  }
  void raw(std::string_view s) { buf_.append(s); }

  const std::string& bytes() const noexcept { return buf_; }

 private:
  std::string buf_;
};

class BlobReader {
 public:
  explicit BlobReader(std::string_view bytes) : data_(bytes) {}

  std::uint32_t u32() { return take<std::uint32_t>(); }
  std::uint64_t u64() { return take<std::uint64_t>(); }
  double f64() { return take<double>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

  Vector vec() {
    const auto n = count(8);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }
  Matrix mat() {
    const auto r = u64();
    const auto c = u64();
    if (c != 0 && r > remaining() / 8 / c) fail(Errc::CorruptData, "model matrix exceeds payload");
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    return m;
  }
  template <typename T>
  std::vector<T> ints() {
    const auto n = count(8);
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(u64());
    return v;
  }
  std::string_view raw(std::size_t n) {
    if (n > remaining()) fail(Errc::CorruptData, "truncated model payload");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::size_t count(std::size_t elem) {
    const auto n = u64();
    if (n > remaining() / elem) fail(Errc::CorruptData, "model array exceeds payload");
    return static_cast<std::size_t>(n);
  }

  template <typename T>
  T take() {
    if (sizeof(T) > remaining()) fail(Errc::CorruptData, "truncated model payload");
    const auto v = detail::get_le<T>(reinterpret_cast<const unsigned char*>(data_.data()) + pos_);
    pos_ += sizeof(T);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

/// A fitted binary classifier. `score` > 0 means defect; every model is
/// immutable once trained, so concurrent scoring is safe.
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const noexcept = 0;
  virtual Eigen::Index dims() const noexcept = 0;

  /// Scores every row of `x` (raw, unstandardized features).
  Vector score(const Matrix& x) const {
    if (x.cols() != dims())
      fail(Errc::DimensionMismatch,
           "model expects " + std::to_string(dims()) + " features, got " + std::to_string(x.cols()));
    return score_rows(x);
  }

  double score(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != dims())
      fail(Errc::DimensionMismatch,
           "model expects " + std::to_string(dims()) + " features, got " + std::to_string(x.size()));
    Matrix row(1, dims());
    for (Eigen::Index j = 0; j < dims(); ++j) row(0, j) = x[static_cast<std::size_t>(j)];
    return score_rows(row)(0);
  }

  int predict(std::span<const double> x) const { return score(x) > 0.0 ? 1 : 0; }

  std::vector<int> predict(const Matrix& x) const {
    const Vector s = score(x);
    std::vector<int> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) > 0.0 ? 1 : 0;
    return out;
  }

  virtual void save_body(BlobWriter& w) const = 0;

 protected:
  virtual Vector score_rows(const Matrix& x) const = 0;
};

using TrainedModel = std::shared_ptr<const Model>;

inline void write_standardizer(BlobWriter& w, const Standardizer& s) {
  w.vec(s.mean);
  w.vec(s.scale);
}

inline Standardizer read_standardizer(BlobReader& r) {
  Standardizer s;
  s.mean = r.vec();
  s.scale = r.vec();
  if (s.mean.size() != s.scale.size()) fail(Errc::CorruptData, "standardizer length mismatch");
  return s;
}

/// Predicts the training majority everywhere (ties go to class 0).
class MajorityModel final : public Model {
 public:
  MajorityModel(Eigen::Index dims, double defect_fraction) : dims_(dims), fraction_(defect_fraction) {}

  static MajorityModel fit(const Dataset& d) {
    d.validate();
    return MajorityModel(d.dims(), static_cast<double>(d.class_counts()[1]) / static_cast<double>(d.size()));
  }

  ModelKind kind() const noexcept override { return ModelKind::Majority; }
  Eigen::Index dims() const noexcept override { return dims_; }
  double defect_fraction() const noexcept { return fraction_; }

  void save_body(BlobWriter& w) const override {
    w.u64(static_cast<std::uint64_t>(dims_));
    w.f64(fraction_);
  }
  static MajorityModel load_body(BlobReader& r) {
    const auto dims = static_cast<Eigen::Index>(r.u64());
    return MajorityModel(dims, r.f64());
  }

 protected:
  Vector score_rows(const Matrix& x) const override { return Vector::Constant(x.rows(), fraction_ - 0.5); }

 private:
  Eigen::Index dims_;
  double fraction_;
};

}  // namespace lv
