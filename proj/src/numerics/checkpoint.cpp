#include "d2t/numerics/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "d2t/errors.hpp"

namespace d2t::nn {
namespace {

constexpr const char* kMagic = "d2t-checkpoint";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamStore& params) {
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "params " << params.size() << '\n';
  for (const auto& [name, entry] : params.entries()) {
    const Matrix& m = entry.value;
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  }
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

void read_checkpoint(std::istream& in, ParamStore& params) {
  std::string magic, tag;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw DataError("not a d2t checkpoint");
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  if (!(in >> tag >> count) || tag != "params") throw DataError("checkpoint: missing header");
  if (count != params.size()) {
    throw DataError("checkpoint has " + std::to_string(count) + " parameters, model expects " +
                    std::to_string(params.size()));
  }
  for (std::size_t p = 0; p < count; ++p) {
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols)) throw DataError("checkpoint: truncated entry header");
    if (!params.contains(name)) throw DataError("checkpoint: unexpected parameter " + name);
    Matrix& m = params.value(name);
    if (m.rows() != rows || m.cols() != cols) {
      throw DataError("checkpoint: " + name + " is " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ", model expects " + m.shape_string());
    }
    for (double& v : m.values()) {
      std::string tok;
      if (!(in >> tok)) throw DataError("checkpoint: truncated values for " + name);
      v = std::stod(tok);
    }
  }
}

void load_checkpoint(const std::filesystem::path& path, ParamStore& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  read_checkpoint(in, params);
}

}  // namespace d2t::nn
