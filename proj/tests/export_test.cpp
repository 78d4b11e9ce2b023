#include <gtest/gtest.h>

#include <regex>
#include <set>
#include <sstream>

#include "nrrw/export.hpp"
#include "nrrw/statistics.hpp"

using namespace nrrw;

TEST(EdgeList, RoundTrip) {
  const SimConfig config{2, 500, 9};
  const RunResult r = run(config);
  std::stringstream buffer;
  write_edge_list(buffer, r.tree, config);
  const EdgeList parsed = read_edge_list(buffer);
  EXPECT_EQ(parsed.step_parameter, 2u);
  EXPECT_EQ(parsed.nodes, 500u);
  EXPECT_EQ(parsed.seed, 9u);
  ASSERT_EQ(parsed.edges.size(), 500u);
  EXPECT_EQ(parsed.edges.front(), (std::pair<Vertex, Vertex>{0, 0}));
  for (std::size_t i = 1; i < parsed.edges.size(); ++i) {
    EXPECT_EQ(parsed.edges[i].first, r.tree.parent(i));
    EXPECT_EQ(parsed.edges[i].second, i);
  }
}

TEST(EdgeList, MalformedInputThrows) {
  std::istringstream in("# nrrw s=2 n=3 seed=1\n0 0\n0 x\n");
  EXPECT_THROW(read_edge_list(in), std::runtime_error);
}

TEST(Dot, VertexCountRoundTrips) {
  const RunResult r = run(SimConfig{1, 300, 4});
  std::ostringstream out;
  write_dot(out, r.tree);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("graph nrrw {", 0), 0u);
  std::set<std::string> vertices;
  const std::regex node(R"(^\s*(\d+);$)");
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_match(line, m, node)) vertices.insert(m[1]);
  }
  EXPECT_EQ(vertices.size(), r.tree.vertex_count());
  EXPECT_NE(text.find("0 -- 0;"), std::string::npos);
}

TEST(Trajectory, CsvHeaderAndRows) {
  const RunResult r = run(SimConfig{2, 3, 1, true});
  std::ostringstream out;
  write_trajectory_csv(out, r.trajectory);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,position,via_self_loop,attached");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0,1,");
  std::getline(in, line);
  EXPECT_EQ(line, "2,0,1,1");
}
