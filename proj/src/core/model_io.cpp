#include "model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace tbnpb {
namespace {

constexpr char kMagic[6] = {'T', 'B', 'N', 'P', 'B', '1'};
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& buf, const std::string& path)
      : buf_(buf), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i]))
              << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  Eigen::VectorXd vec(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = f64();
    return v;
  }

  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) {
    require(pos_ + n <= buf_.size(), ErrorCode::parse_failure,
            path_ + ": truncated model file");
  }

  const std::string& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

void write_stats(std::string& out, const NormStats& s) {
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) put_f64(out, s.mean[i]);
  for (Eigen::Index i = 0; i < s.std.size(); ++i) put_f64(out, s.std[i]);
}

}  // namespace

void save_model(const std::string& path, const MlpModel& model,
                const std::vector<LatentEntry>& latents) {
  model.validate();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(model.command_dim));
  put_u32(out, static_cast<std::uint32_t>(model.latent_dim));
  put_u32(out, static_cast<std::uint32_t>(model.layer_dims.size()));
  for (int d : model.layer_dims) put_u32(out, static_cast<std::uint32_t>(d));
  write_stats(out, model.in_norm);
  write_stats(out, model.out_norm);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const Eigen::MatrixXd& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i)
      put_f64(out, model.biases[l][i]);
  }
  put_u32(out, static_cast<std::uint32_t>(latents.size()));
  for (const auto& entry : latents) {
    require(entry.code.size() == model.latent_dim, ErrorCode::dimension_mismatch,
            "latent entry dimension does not match the model");
    put_u32(out, entry.grasp_id);
    for (Eigen::Index i = 0; i < entry.code.size(); ++i)
      put_f64(out, entry.code[i]);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.close();
  require(f.good(), ErrorCode::io_failure, "failed writing " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());

  require(buf.size() >= sizeof(kMagic), ErrorCode::parse_failure,
          path + ": not a model file");
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    if (std::memcmp(buf.data(), kMagic, 5) == 0)
      fail(ErrorCode::parse_failure,
           path + ": unsupported model file version '" +
               std::string(1, buf[5]) + "'");
    fail(ErrorCode::parse_failure, path + ": not a model file");
  }

  std::string body = buf.substr(sizeof(kMagic));
  Reader r(body, path);
  const std::uint32_t command_dim = r.u32();
  const std::uint32_t latent_dim = r.u32();
  const std::uint32_t n_layers = r.u32();
  require(command_dim >= 1 && command_dim < kMaxDim && latent_dim < kMaxDim &&
              n_layers >= 2 && n_layers < 64,
          ErrorCode::parse_failure, path + ": implausible model dimensions");

  ModelFile mf;
  MlpModel& m = mf.model;
  m.command_dim = static_cast<int>(command_dim);
  m.latent_dim = static_cast<int>(latent_dim);
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint32_t d = r.u32();
    require(d >= 1 && d < kMaxDim, ErrorCode::parse_failure,
            path + ": implausible layer width");
    m.layer_dims.push_back(static_cast<int>(d));
  }
  require(m.layer_dims.front() ==
              static_cast<int>(command_dim + latent_dim),
          ErrorCode::parse_failure, path + ": inconsistent input width");

  m.in_norm.mean = r.vec(command_dim);
  m.in_norm.std = r.vec(command_dim);
  m.out_norm.mean = r.vec(m.layer_dims.back());
  m.out_norm.std = r.vec(m.layer_dims.back());

  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    const auto rows = static_cast<std::size_t>(m.layer_dims[l + 1]);
    const auto cols = static_cast<std::size_t>(m.layer_dims[l]);
    // bound allocations by what the file could actually hold
    require(rows * cols * sizeof(double) <= body.size(),
            ErrorCode::parse_failure, path + ": truncated model file");
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index row = 0; row < w.rows(); ++row)
      for (Eigen::Index col = 0; col < w.cols(); ++col) w(row, col) = r.f64();
    m.weights.push_back(std::move(w));
    m.biases.push_back(r.vec(m.layer_dims[l + 1]));
  }

  const std::uint32_t n_latents = r.u32();
  require(n_latents < kMaxDim, ErrorCode::parse_failure,
          path + ": implausible latent count");
  for (std::uint32_t i = 0; i < n_latents; ++i) {
    LatentEntry e;
    e.grasp_id = r.u32();
    e.code = r.vec(latent_dim);
    mf.latents.push_back(std::move(e));
  }
  require(r.at_end(), ErrorCode::parse_failure,
          path + ": trailing bytes after model data");
  m.validate();
  return mf;
}

std::string serialize_params(const MlpModel& model) {
  std::string out;
  for (const auto& w : model.weights)
    out.append(reinterpret_cast<const char*>(w.data()),
               static_cast<std::size_t>(w.size()) * sizeof(double));
  for (const auto& b : model.biases)
    out.append(reinterpret_cast<const char*>(b.data()),
               static_cast<std::size_t>(b.size()) * sizeof(double));
  return out;
}

const Eigen::VectorXd* find_latent(const std::vector<LatentEntry>& latents,
                                   std::uint32_t grasp_id) {
  for (const auto& e : latents)
    if (e.grasp_id == grasp_id) return &e.code;
  return nullptr;
}

}  // namespace tbnpb
