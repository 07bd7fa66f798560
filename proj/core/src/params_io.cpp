#include "geomet/params_io.hpp"

#include <charconv>
#include <fstream>

#include "geomet/errors.hpp"

namespace geomet {

namespace {

constexpr const char* kMagic = "geomet-params";
constexpr int kFormatVersion = 1;

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);  // shortest exact form
  out.append(buf, res.ptr);
}

void append_matrix(std::string& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      append_double(out, m(i, j));
    }
    out += '\n';
  }
}

class LineReader {
 public:
  LineReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open params file: " + path);
  }

  // Next nonempty line; throws when the file ends.
  std::string next(const char* context) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw IoError(path_ + ": unexpected end of file while reading " +
                  std::string(context));
  }

  std::string where() const { return path_ + ":" + std::to_string(line_no_); }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

// "key value..." with the value possibly containing spaces.
std::pair<std::string, std::string> split_key_value(const std::string& line) {
  std::size_t pos = line.find(' ');
  if (pos == std::string::npos) return {line, ""};
  return {line.substr(0, pos), line.substr(pos + 1)};
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError(where + ": unparseable float '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError(where + ": unparseable integer '" + s + "'");
  return v;
}

Matrix read_matrix(LineReader& reader, Index d, const char* name) {
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    std::string line = reader.next(name);
    const char* p = line.data();
    const char* end = p + line.size();
    for (Index j = 0; j < d; ++j) {
      while (p != end && *p == ' ') ++p;
      double v = 0.0;
      auto [np, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw IoError(reader.where() + ": unparseable float in matrix " + name);
      m(i, j) = v;
      p = np;
    }
    while (p != end && *p == ' ') ++p;
    if (p != end)
      throw IoError(reader.where() + ": trailing data in matrix " + name);
  }
  return m;
}

}  // namespace

ParamsFile make_params_file(const ProductPoint& point, std::string source_x,
                            std::string source_z, PreprocessOptions preprocess,
                            double reg_c, Termination termination) {
  ParamsFile params;
  params.format_version = kFormatVersion;
  params.d = point.dim();
  params.source_x = std::move(source_x);
  params.source_z = std::move(source_z);
  params.preprocess = preprocess;
  params.reg_c = reg_c;
  params.termination = termination;
  params.u = point.u.m();
  params.v = point.v.m();
  params.b = point.b.m();
  return params;
}

ProductPoint to_product_point(const ParamsFile& params) {
  if (params.u.rows() != params.d || params.v.rows() != params.d ||
      params.b.rows() != params.d)
    throw DataError("params matrices do not match declared dimension");
  return ProductPoint(OrthogonalPoint(params.u), OrthogonalPoint(params.v),
                      SPDPoint(params.b));
}

void save_params(const ParamsFile& params, const std::string& path) {
  if (path.empty()) throw IoError("empty params path");
  to_product_point(params);  // refuse to write an infeasible triple

  std::string buf;
  buf += kMagic;
  buf += ' ';
  buf += std::to_string(params.format_version);
  buf += '\n';
  buf += "d " + std::to_string(params.d) + '\n';
  buf += "source_x " + params.source_x + '\n';
  buf += "source_z " + params.source_z + '\n';
  buf += "unit_norm ";
  buf += params.preprocess.unit_normalize ? '1' : '0';
  buf += '\n';
  buf += "mean_center ";
  buf += params.preprocess.mean_center ? '1' : '0';
  buf += '\n';
  buf += "reg_c ";
  append_double(buf, params.reg_c);
  buf += '\n';
  buf += "termination ";
  buf += to_string(params.termination);
  buf += '\n';
  buf += "U\n";
  append_matrix(buf, params.u);
  buf += "V\n";
  append_matrix(buf, params.v);
  buf += "B\n";
  append_matrix(buf, params.b);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

ParamsFile load_params(const std::string& path) {
  LineReader reader(path);
  ParamsFile params;

  auto [magic, version] = split_key_value(reader.next("magic line"));
  if (magic != kMagic)
    throw IoError(path + ": not a geomet params file");
  params.format_version = static_cast<int>(parse_long(version, reader.where()));
  if (params.format_version != kFormatVersion)
    throw IoError(path + ": unsupported format version " + version);

  bool have_d = false;
  while (true) {
    std::string line = reader.next("header");
    if (line == "U") break;
    auto [key, value] = split_key_value(line);
    if (key == "d") {
      long d = parse_long(value, reader.where());
      if (d < 1) throw IoError(reader.where() + ": dimension must be positive");
      params.d = static_cast<Index>(d);
      have_d = true;
    } else if (key == "source_x") {
      params.source_x = value;
    } else if (key == "source_z") {
      params.source_z = value;
    } else if (key == "unit_norm") {
      params.preprocess.unit_normalize = parse_long(value, reader.where()) != 0;
    } else if (key == "mean_center") {
      params.preprocess.mean_center = parse_long(value, reader.where()) != 0;
    } else if (key == "reg_c") {
      params.reg_c = parse_double(value, reader.where());
    } else if (key == "termination") {
      try {
        params.termination = termination_from_string(value);
      } catch (const DataError& e) {
        throw IoError(reader.where() + ": " + e.what());
      }
    } else {
      throw IoError(reader.where() + ": unknown header key '" + key + "'");
    }
  }
  if (!have_d) throw IoError(path + ": missing dimension");

  params.u = read_matrix(reader, params.d, "U");
  if (reader.next("V marker") != "V")
    throw IoError(reader.where() + ": expected matrix marker V");
  params.v = read_matrix(reader, params.d, "V");
  if (reader.next("B marker") != "B")
    throw IoError(reader.where() + ": expected matrix marker B");
  params.b = read_matrix(reader, params.d, "B");
  return params;
}

}  // namespace geomet
