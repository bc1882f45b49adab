#include "structpen/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace structpen {
namespace io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field) {
  const std::string t = strip(field);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed number: '" + field + "'");
  }
  if (used != t.size())
    throw std::invalid_argument("malformed number: '" + field + "'");
  return v;
}

int parse_int(const std::string& field) {
  const double v = parse_double(field);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("expected integer: '" + field + "'");
  return i;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!strip(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

Vector parse_vector(const std::string& text) {
  const auto fields = split(strip(text), ',');
  require(!fields.empty(), "empty vector");
  Vector v(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = parse_double(fields[i]);
  return v;
}

Matrix read_matrix_csv(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty(), "empty matrix file: " + path);
  std::vector<std::vector<double>> rows;
  for (const auto& line : lines) {
    const auto fields = split(strip(line), ',');
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f));
    if (!rows.empty())
      require(row.size() == rows.front().size(),
              "ragged rows in matrix file: " + path);
    rows.push_back(std::move(row));
  }
  Matrix M(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return M;
}

Vector read_vector_csv(const std::string& path) {
  const Matrix M = read_matrix_csv(path);
  if (M.rows() == 1) return M.row(0).transpose();
  require(M.cols() == 1, "vector file must have one column or one row");
  return M.col(0);
}

RootedTree read_tree(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty(), "empty tree file: " + path);
  const int n = static_cast<int>(lines.size());
  std::vector<int> parent(n, -2);
  for (const auto& line : lines) {
    const auto fields = split(strip(line), ',');
    require(fields.size() == 2, "tree line must be 'v,parent': " + line);
    const int v = parse_int(fields[0]);
    require(v >= 1 && v <= n, "tree vertex out of range: " + line);
    require(parent[v - 1] == -2, "duplicate tree vertex: " + line);
    const std::string p = strip(fields[1]);
    if (p.empty()) {
      parent[v - 1] = -1;
    } else {
      const int pv = parse_int(p);
      require(pv >= 1 && pv <= n, "tree parent out of range: " + line);
      parent[v - 1] = pv - 1;
    }
  }
  return RootedTree::from_parents(std::move(parent));
}

std::vector<std::vector<int>> read_groups(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<int>> groups;
  for (const auto& line : lines) {
    std::vector<int> g;
    for (const auto& f : split(strip(line), ','))
      g.push_back(parse_int(f) - 1);
    groups.push_back(std::move(g));
  }
  return groups;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace io
}  // namespace structpen
