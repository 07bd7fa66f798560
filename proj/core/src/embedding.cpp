#include "geomet/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>
#include <unordered_set>

#include "geomet/errors.hpp"

namespace geomet {

namespace {

constexpr const char* kTokenForbidden = " \t\n\r\v\f";

bool parse_count(std::string_view field, std::size_t& out) {
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::string location(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

// Parses "token v1 ... vd" into `token` and `values` (values appended).
void parse_data_line(const std::string& line, const std::string& path,
                     std::size_t line_no, std::string& token,
                     std::vector<double>& values) {
  const char* p = line.data();
  const char* end = p + line.size();
  const char* tok_end = std::find(p, end, ' ');
  if (tok_end == p)
    throw IoError(location(path, line_no) + ": empty token");
  if (tok_end == end)
    throw IoError(location(path, line_no) + ": no vector values after token");
  token.assign(p, tok_end);
  p = tok_end;
  while (p != end) {
    while (p != end && *p == ' ') ++p;
    if (p == end) break;
    double v = 0.0;
    auto [np, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (np != end && *np != ' '))
      throw IoError(location(path, line_no) + ": unparseable float '" +
                    std::string(p, std::find(p, end, ' ')) + "'");
    values.push_back(v);
    p = np;
  }
}

void append_double(std::string& out, double v, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                           precision);
  out.append(buf, res.ptr);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1)
    throw DataError("embedding table needs at least one word and one dimension");
  if (static_cast<Index>(words_.size()) != vectors_.cols())
    throw DataError("word count does not match vector count");
  if (!vectors_.allFinite())
    throw DataError("embedding table contains non-finite entries");
  index_.reserve(words_.size());
  for (Index i = 0; i < static_cast<Index>(words_.size()); ++i) {
    const std::string& w = words_[static_cast<std::size_t>(i)];
    if (w.empty() || w.find_first_of(kTokenForbidden) != std::string::npos)
      throw DataError("invalid token: '" + w + "'");
    if (!index_.emplace(w, i).second)
      throw DataError("duplicate token: '" + w + "'");
  }
}

std::optional<Index> EmbeddingTable::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AlignedPair::AlignedPair(EmbeddingTable x, EmbeddingTable z)
    : x_(std::move(x)), z_(std::move(z)) {
  if (x_.dim() != z_.dim())
    throw DataError("aligned pair dimensions differ");
  if (x_.words() != z_.words())
    throw DataError("aligned pair vocabularies differ");
}

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<std::size_t> max_words,
                               LoadStats* stats) {
  if (max_words && *max_words == 0)
    throw std::invalid_argument("max_words must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file: " + path);

  std::vector<std::string> words;
  std::vector<double> values;  // d consecutive entries per kept word
  std::unordered_set<std::string> seen;
  std::size_t duplicates = 0;

  std::optional<std::size_t> header_n;
  std::optional<std::size_t> header_d;
  Index d = -1;
  std::string line;
  std::string token;
  std::vector<double> row;
  std::size_t line_no = 0;
  std::size_t data_lines = 0;
  bool first_content = true;
  bool truncated = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (first_content) {
      first_content = false;
      // A first line of exactly two integers is the "n d" header.
      auto space = line.find(' ');
      if (space != std::string::npos && line.find(' ', space + 1) == std::string::npos) {
        std::size_t n_val = 0;
        std::size_t d_val = 0;
        if (parse_count(std::string_view(line).substr(0, space), n_val) &&
            parse_count(std::string_view(line).substr(space + 1), d_val)) {
          if (d_val == 0)
            throw IoError(location(path, line_no) + ": header dimension must be positive");
          header_n = n_val;
          header_d = d_val;
          d = static_cast<Index>(d_val);
          std::size_t expect = max_words ? std::min(*max_words, n_val) : n_val;
          words.reserve(expect);
          values.reserve(expect * d_val);
          seen.reserve(expect);
          continue;
        }
      }
    }

    row.clear();
    parse_data_line(line, path, line_no, token, row);
    if (d < 0) {
      d = static_cast<Index>(row.size());
    } else if (static_cast<Index>(row.size()) != d) {
      throw IoError(location(path, line_no) + ": expected " + std::to_string(d) +
                    " values, found " + std::to_string(row.size()));
    }
    ++data_lines;

    if (!seen.insert(token).second) {
      ++duplicates;
      continue;
    }
    words.push_back(token);
    values.insert(values.end(), row.begin(), row.end());
    if (max_words && words.size() >= *max_words) {
      truncated = true;
      break;
    }
  }
  if (in.bad()) throw IoError("read failure on " + path);

  if (words.empty()) throw IoError("empty embedding file: " + path);
  if (header_d && static_cast<Index>(*header_d) != d)
    throw IoError(path + ": header dimension " + std::to_string(*header_d) +
                  " does not match content dimension " + std::to_string(d));
  if (header_n && !truncated && data_lines != *header_n)
    throw IoError(path + ": header declares " + std::to_string(*header_n) +
                  " words, file has " + std::to_string(data_lines));

  if (stats) stats->duplicates_dropped = duplicates;

  const Index n = static_cast<Index>(words.size());
  Matrix vectors = Eigen::Map<const Matrix>(values.data(), d, n);
  return EmbeddingTable(std::move(words), std::move(vectors));
}

void save_embeddings(const EmbeddingTable& table, const std::string& path,
                     bool with_header) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  std::string buf;
  buf.reserve(1 << 16);
  if (with_header) {
    buf += std::to_string(table.size());
    buf += ' ';
    buf += std::to_string(table.dim());
    buf += '\n';
  }
  const Matrix& m = table.vectors();
  for (Index i = 0; i < table.size(); ++i) {
    buf += table.words()[static_cast<std::size_t>(i)];
    for (Index r = 0; r < table.dim(); ++r) {
      buf += ' ';
      append_double(buf, m(r, i), 9);
    }
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

AlignedPair intersect_vocab(const EmbeddingTable& a, const EmbeddingTable& b) {
  if (a.dim() != b.dim())
    throw DataError("cannot intersect tables of dimension " +
                    std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  std::vector<std::string> shared;
  std::vector<Index> a_cols;
  std::vector<Index> b_cols;
  for (Index i = 0; i < a.size(); ++i) {
    const std::string& w = a.words()[static_cast<std::size_t>(i)];
    if (auto j = b.find(w)) {
      shared.push_back(w);
      a_cols.push_back(i);
      b_cols.push_back(*j);
    }
  }
  if (shared.empty()) throw DataError("empty intersection");

  const Index k = static_cast<Index>(shared.size());
  Matrix x(a.dim(), k);
  Matrix z(a.dim(), k);
  for (Index i = 0; i < k; ++i) {
    x.col(i) = a.vectors().col(a_cols[static_cast<std::size_t>(i)]);
    z.col(i) = b.vectors().col(b_cols[static_cast<std::size_t>(i)]);
  }
  EmbeddingTable x_table(shared, std::move(x));
  EmbeddingTable z_table(std::move(shared), std::move(z));
  return AlignedPair(std::move(x_table), std::move(z_table));
}

EmbeddingTable preprocess(const EmbeddingTable& table,
                          const PreprocessOptions& opts,
                          std::size_t* zero_columns) {
  Matrix m = table.vectors();
  if (opts.mean_center) {
    Vector mean = m.rowwise().mean();
    m.colwise() -= mean;
  }
  std::size_t zeros = 0;
  if (opts.unit_normalize) {
    for (Index i = 0; i < m.cols(); ++i) {
      double norm = m.col(i).norm();
      if (norm == 0.0) {
        ++zeros;
        continue;
      }
      m.col(i) /= norm;
    }
  }
  if (zero_columns) *zero_columns = zeros;
  return EmbeddingTable(table.words(), std::move(m));
}

}  // namespace geomet
