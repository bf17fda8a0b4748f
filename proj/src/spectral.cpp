#include "jgmatch/spectral.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "jgmatch/error.hpp"

namespace jgmatch {

Eigen::MatrixXd SpectralEmbedding::stacked() const {
  Eigen::MatrixXd out(rows1.rows() + rows2.rows(), m);
  out << rows1, rows2;
  return out;
}

double coefficient_of_variation(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return 0.0;
  const double mean_abs = v.cwiseAbs().mean();
  if (mean_abs == 0.0) return 0.0;
  const double mean = v.mean();
  const double variance = (v.array() - mean).square().mean();
  return std::sqrt(variance) / mean_abs;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v.size() > 0 && v[arg] < 0.0) v = -v;
}

SpectralEmbedding eig_topm(const JointAffinity& affinity, const EigOptions& options) {
  if (options.m < 1) {
    throw Error(ErrorKind::Parameter, "embedding dimension m must be at least 1");
  }
  if (!(options.triviality_cv_threshold > 0.0)) {
    throw Error(ErrorKind::Parameter, "triviality threshold must be positive");
  }
  const auto n = affinity.matrix.rows();
  if (affinity.matrix.cols() != n || n != affinity.size()) {
    throw Error(ErrorKind::Dimension, "joint affinity matrix shape does not match n1 + n2");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(affinity.matrix,
                                                        Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "symmetric eigensolver did not converge");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  SpectralEmbedding out;
  out.m = options.m;
  out.eigenvalues.resize(options.m);
  Eigen::MatrixXd retained(n, options.m);
  int kept = 0;
  for (Eigen::Index rank = 0; rank < n && kept < options.m; ++rank) {
    const Eigen::Index source = n - 1 - rank;
    if (coefficient_of_variation(vectors.col(source)) < options.triviality_cv_threshold) {
      out.trivial_indices.push_back(static_cast<int>(rank));
      continue;
    }
    retained.col(kept) = vectors.col(source);
    fix_sign(retained.col(kept));
    out.eigenvalues[kept] = values[source];
    ++kept;
  }
  if (kept < options.m) {
    throw Error(ErrorKind::Capacity,
                "only " + std::to_string(kept) + " non-trivial eigenvectors available, " +
                    std::to_string(options.m) + " requested");
  }
  out.rows1 = retained.topRows(affinity.n1);
  out.rows2 = retained.bottomRows(affinity.n2);
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>(v >> (8 * i)));
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class ByteReader {
 public:
  ByteReader(std::vector<unsigned char> bytes, std::string source)
      : bytes_(std::move(bytes)), source_(std::move(source)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f32() { return std::bit_cast<float>(u32()); }
  unsigned char byte() {
    need(1);
    return bytes_[pos_++];
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) throw Error(ErrorKind::Truncation, source_ + ": JEMB truncated");
  }

  std::vector<unsigned char> bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_embedding(const SpectralEmbedding& embedding, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write embedding " + path.string());
  out.write("JEMB", 4);
  out.put(1);
  out.put(0);
  out.put(0);
  out.put(0);
  put_u32(out, static_cast<std::uint32_t>(embedding.rows1.rows()));
  put_u32(out, static_cast<std::uint32_t>(embedding.rows2.rows()));
  put_u32(out, static_cast<std::uint32_t>(embedding.m));
  for (int k = 0; k < embedding.m; ++k) put_f32(out, embedding.eigenvalues[k]);
  for (const auto* rows : {&embedding.rows1, &embedding.rows2}) {
    for (Eigen::Index i = 0; i < rows->rows(); ++i)
      for (Eigen::Index k = 0; k < rows->cols(); ++k) put_f32(out, (*rows)(i, k));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

SpectralEmbedding load_embedding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open embedding " + path.string());
  ByteReader reader(std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                               std::istreambuf_iterator<char>()),
                    path.string());
  const char magic[4] = {static_cast<char>(reader.byte()), static_cast<char>(reader.byte()),
                         static_cast<char>(reader.byte()), static_cast<char>(reader.byte())};
  if (std::string_view(magic, 4) != "JEMB") {
    throw Error(ErrorKind::Format, path.string() + ": bad JEMB magic");
  }
  if (reader.byte() != 1) throw Error(ErrorKind::Format, path.string() + ": bad JEMB version");
  for (int i = 0; i < 3; ++i) {
    if (reader.byte() != 0) {
      throw Error(ErrorKind::Format, path.string() + ": JEMB reserved bytes must be zero");
    }
  }
  const std::uint64_t n1 = reader.u32();
  const std::uint64_t n2 = reader.u32();
  const std::uint64_t m = reader.u32();
  if (reader.remaining() != 4 * (m + n1 * m + n2 * m)) {
    throw Error(ErrorKind::Truncation, path.string() + ": JEMB payload size mismatch");
  }
  SpectralEmbedding e;
  e.m = static_cast<int>(m);
  e.eigenvalues.resize(e.m);
  for (auto& v : e.eigenvalues) v = reader.f32();
  e.rows1.resize(static_cast<Eigen::Index>(n1), e.m);
  e.rows2.resize(static_cast<Eigen::Index>(n2), e.m);
  for (auto* rows : {&e.rows1, &e.rows2}) {
    for (Eigen::Index i = 0; i < rows->rows(); ++i)
      for (Eigen::Index k = 0; k < rows->cols(); ++k) (*rows)(i, k) = reader.f32();
  }
  return e;
}

}  // namespace jgmatch
