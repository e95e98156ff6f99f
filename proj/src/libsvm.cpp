#include "trsqp/libsvm.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace trsqp {

namespace {

struct Entry {
  Index index;  // 0-based
  double value;
};

struct RawLine {
  double label;
  std::vector<Entry> entries;
};

double parse_double(const std::string& token, long line_no, const char* what) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  double value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, std::string("malformed ") + what + " '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line_no, std::string("non-finite ") + what + " '" + token + "'");
  }
  return value;
}

long parse_index(const std::string& token, long line_no) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  long value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "malformed feature index '" + token + "'");
  }
  if (value <= 0) {
    throw ParseError(line_no, "feature index must be >= 1, got " + token);
  }
  return value;
}

double remap_label(double label, long line_no) {
  if (label == -1 || label == 1) return label;
  if (label == 0) return -1;  // {0,1} convention remapped to {-1,+1}
  // also accept "+1" parsed as 1 above; anything else is unsupported
  throw ParseError(line_no, "unsupported label value " + std::to_string(label));
}

}  // namespace

Dataset parse_libsvm_text(const std::string& text, std::optional<Index> dim_hint) {
  std::vector<RawLine> lines;
  Index max_index = 0;

  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();  // CRLF
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line

    RawLine row;
    std::string label_token = token;
    if (!label_token.empty() && label_token.front() == '+') label_token.erase(0, 1);
    row.label = remap_label(parse_double(label_token, line_no, "label"), line_no);

    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size()) {
        throw ParseError(line_no, "expected <index>:<value>, got '" + token + "'");
      }
      const long idx = parse_index(token.substr(0, colon), line_no);
      const double value = parse_double(token.substr(colon + 1), line_no, "feature value");
      row.entries.push_back({static_cast<Index>(idx) - 1, value});
      max_index = std::max<Index>(max_index, static_cast<Index>(idx));
    }
    lines.push_back(std::move(row));
  }

  if (lines.empty()) throw ParseError(line_no, "no samples in input");

  Dataset data;
  data.n_samples = static_cast<Index>(lines.size());
  data.dim = std::max<Index>(max_index, dim_hint.value_or(0));
  if (data.dim <= 0) throw ParseError(line_no, "no features in input");
  data.features = Matrix::Zero(data.n_samples, data.dim);
  data.labels = Vector(data.n_samples);
  for (Index i = 0; i < data.n_samples; ++i) {
    data.labels(i) = lines[static_cast<size_t>(i)].label;
    for (const Entry& e : lines[static_cast<size_t>(i)].entries) {
      data.features(i, e.index) = e.value;
    }
  }
  return data;
}

Dataset parse_libsvm(const std::string& path, std::optional<Index> dim_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_libsvm: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_libsvm_text(buffer.str(), dim_hint);
}

std::string write_libsvm_text(const Dataset& data) {
  std::ostringstream os;
  os.precision(17);
  for (Index i = 0; i < data.n_samples; ++i) {
    os << (data.labels(i) > 0 ? "+1" : "-1");
    for (Index j = 0; j < data.dim; ++j) {
      const double v = data.features(i, j);
      if (v != 0.0) os << ' ' << (j + 1) << ':' << v;
    }
    os << '\n';
  }
  return os.str();
}

void write_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_libsvm: cannot open '" + path + "'");
  out << write_libsvm_text(data);
}

}  // namespace trsqp
