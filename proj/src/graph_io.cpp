#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qsn/error.hpp"
#include "qsn/graph.hpp"

namespace qsn {

void write_graph(std::ostream& out, const Graph& g) {
  out << "n=" << g.size() << '\n';
  for (const auto& l : g.links()) out << l.a << ' ' << l.b << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  while (n < 0 && std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("n=", 0) != 0)
      throw IoError("graph line " + std::to_string(line_no) + ": expected header 'n=<count>'");
    try {
      std::size_t used = 0;
      n = std::stoi(line.substr(2), &used);
      if (used != line.size() - 2 || n < 0) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw IoError("graph line " + std::to_string(line_no) + ": bad node count");
    }
  }
  if (n < 0) throw IoError("graph: missing 'n=<count>' header");

  std::vector<Link> links;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Link l;
    std::string rest;
    if (!(fields >> l.a >> l.b) || (fields >> rest))
      throw IoError("graph line " + std::to_string(line_no) + ": expected 'i j'");
    links.push_back(l);
  }
  try {
    return Graph(n, std::move(links));
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("graph: ") + e.what());
  }
}

}  // namespace qsn
