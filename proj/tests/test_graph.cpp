// Copyright 2026 The vnhgcn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_support.hpp"
#include "vnhgcn/graph.hpp"

namespace vnhgcn {
namespace {

NetworkSchema author_paper_schema() {
  NetworkSchema s;
  s.add_node_type("author");
  s.add_node_type("paper");
  s.add_relation_pair("author-paper", "paper-author", 0, 1);
  return s;
}

TEST(Schema, InversePairingIsInvolutive) {
  NetworkSchema s = author_paper_schema();
  for (const Relation& r : s.relations()) {
    const Relation& inv = s.relation(r.inverse);
    EXPECT_EQ(inv.inverse, r.index);
    EXPECT_EQ(inv.src_type, r.dst_type);
    EXPECT_EQ(inv.dst_type, r.src_type);
  }
  EXPECT_EQ(s.incoming(1), std::vector<Index>{0});
  EXPECT_EQ(s.incoming(0), std::vector<Index>{1});
}

TEST(BuildGraph, AcmSizedSchema) {
  // Table-1 sized ACM stand-in: 7167 authors, 4017 papers, 60 subjects.
  NetworkSchema s;
  s.add_node_type("author");
  s.add_node_type("paper");
  s.add_node_type("subject");
  s.add_relation_pair("paper-author", "author-paper", 1, 0);
  s.add_relation_pair("paper-subject", "subject-paper", 1, 2);
  std::mt19937_64 rng(7);
  auto unique_edges = [&](Index nsrc, Index ndst, std::size_t count) {
    std::set<std::pair<Index, Index>> seen;
    std::uniform_int_distribution<Index> us(0, nsrc - 1), ud(0, ndst - 1);
    while (seen.size() < count) seen.emplace(us(rng), ud(rng));
    return EdgeList(seen.begin(), seen.end());
  };
  std::vector<EdgeList> edges{unique_edges(4017, 7167, 13407), {}, unique_edges(4017, 60, 4019), {}};
  HeteroGraph g = build_graph(s, {Matrix::Zero(7167, 4), Matrix::Zero(4017, 4), Matrix::Zero(60, 4)}, edges);
  EXPECT_EQ(g.node_counts, (std::vector<Index>{7167, 4017, 60}));
  EXPECT_EQ(g.adj(0).nnz(), 13407);
  EXPECT_EQ(g.adj(1).nnz(), 13407);
  EXPECT_EQ(g.adj(2).nnz(), 4019);
  EXPECT_EQ(g.adj(3).nnz(), 4019);
}

TEST(BuildGraph, EmptyEdgeListGivesZeroAdjacency) {
  HeteroGraph g = build_graph(author_paper_schema(), {Matrix::Zero(3, 2), Matrix::Zero(2, 2)}, {{}, {}});
  EXPECT_EQ(g.adj(0).nnz(), 0);
  EXPECT_EQ(g.adj(0).rows, 2);
  EXPECT_EQ(g.adj(0).cols, 3);
}

TEST(BuildGraph, DuplicateEdgesCollapse) {
  HeteroGraph g = build_graph(author_paper_schema(), {Matrix::Zero(3, 2), Matrix::Zero(2, 2)},
                              {{{0, 1}, {0, 1}}, {{1, 0}}});
  EXPECT_EQ(g.adj(0).nnz(), 1);
  EXPECT_EQ(g.adj(0).values[0], 1.0);
  EXPECT_EQ(g.adj(1).nnz(), 1);
}

TEST(BuildGraph, OutOfRangeEndpointIsStructuralError) {
  EXPECT_THROW(build_graph(author_paper_schema(), {Matrix::Zero(3, 2), Matrix::Zero(2, 2)}, {{{3, 0}}, {}}),
               StructuralError);
}

TEST(BuildGraph, FeatureCountMismatchIsShapeError) {
  EXPECT_THROW(build_graph(author_paper_schema(), {Matrix::Zero(3, 2)}, {{}, {}}), ShapeError);
  TargetLabels labels{0, 2, {0, 1}};  // 2 labels for 3 authors
  EXPECT_THROW(build_graph(author_paper_schema(), {Matrix::Zero(3, 2), Matrix::Zero(2, 2)}, {{}, {}}, labels),
               ShapeError);
}

TEST(BuildGraph, SelfLoopRejected) {
  NetworkSchema s;
  s.add_node_type("author");
  s.add_relation_pair("coauthor", "coauthor-inv", 0, 0);
  EXPECT_THROW(build_graph(s, {Matrix::Zero(3, 1)}, {{{1, 1}}, {}}), StructuralError);
}

TEST(RowNormalize, HandExample) {
  // [[1,1,0],[0,0,1]] -> [[.5,.5,0],[0,0,1]], checked against dense D^-1 A.
  TypedAdjacency a = csr_from_pairs<double>(2, 3, {{0, 0}, {0, 1}, {1, 2}});
  Matrix expected(2, 3);
  expected << 0.5, 0.5, 0, 0, 0, 1;
  Matrix got = row_normalize(a).to_dense();
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got, testing::dense_normalized(a));
}

TEST(RowNormalize, UniformAndZeroRows) {
  TypedAdjacency a = csr_from_pairs<double>(2, 4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  Matrix got = row_normalize(a).to_dense();
  EXPECT_TRUE(got.row(0).isApprox(Eigen::RowVector4d::Constant(0.25)));
  EXPECT_TRUE(got.row(1).isZero(0.0));
}

TEST(RowNormalize, RowSumsAreZeroOrOneOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    HeteroGraph g = testing::random_graph(rng, 3, 30, 0.3);
    for (const TypedAdjacency& a : g.adjacency) {
      Matrix d = row_normalize(a).to_dense();
      for (Index i = 0; i < d.rows(); ++i) {
        const double s = d.row(i).sum();
        if (a.degree(i) == 0)
          EXPECT_EQ(s, 0.0);
        else
          EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(Graph, InverseAdjacencyIsTranspose) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    HeteroGraph g = testing::random_graph(rng, 3, 20, 0.3);
    for (const Relation& r : g.schema.relations()) EXPECT_EQ(transpose(g.adj(r.index)), g.adj(r.inverse));
  }
}

TEST(KHop, ZeroHopsIsStart) {
  HeteroGraph g = build_graph(author_paper_schema(), {Matrix::Zero(2, 1), Matrix::Zero(1, 1)}, {{{0, 0}, {1, 0}}, {}});
  EXPECT_EQ(khop_nodes(g, {0, 0}, 0), (std::vector<NodeRef>{{0, 0}}));
}

TEST(KHop, PathA0P1A2) {
  HeteroGraph g = build_graph(author_paper_schema(), {Matrix::Zero(2, 1), Matrix::Zero(1, 1)}, {{{0, 0}, {1, 0}}, {}});
  EXPECT_EQ(khop_nodes(g, {0, 0}, 1), (std::vector<NodeRef>{{1, 0}}));
  EXPECT_EQ(khop_nodes(g, {0, 0}, 2), (std::vector<NodeRef>{{0, 1}}));
  EXPECT_TRUE(khop_nodes(g, {0, 0}, 3).empty());
}

TEST(KHop, InvalidStartIsStructuralError) {
  HeteroGraph g = build_graph(author_paper_schema(), {Matrix::Zero(2, 1), Matrix::Zero(1, 1)}, {{}, {}});
  EXPECT_THROW(khop_nodes(g, {0, 5}, 1), StructuralError);
  EXPECT_THROW(khop_nodes(g, {4, 0}, 1), StructuralError);
}

TEST(KHop, MatchesFloydWarshallAndPartitionsReachableSet) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    HeteroGraph g = testing::random_graph(rng, 3, 50, 0.08);
    const auto all = testing::floyd_warshall(g);
    for (Index t = 0; t < g.num_types(); ++t) {
      const NodeRef start{t, 0};
      const Index s = testing::global_id(g, start);
      std::set<NodeRef> seen;
      std::size_t reachable = 0;
      for (Index t2 = 0; t2 < g.num_types(); ++t2)
        for (Index v = 0; v < g.node_counts[t2]; ++v)
          if (all[s][testing::global_id(g, {t2, v})] >= 0) ++reachable;
      for (int k = 0; k <= static_cast<int>(g.total_nodes()); ++k) {
        for (const NodeRef& n : khop_nodes(g, start, k)) {
          EXPECT_EQ(all[s][testing::global_id(g, n)], k);
          EXPECT_TRUE(seen.insert(n).second) << "node in two shells";
        }
      }
      EXPECT_EQ(seen.size(), reachable);
    }
  }
}

}  // namespace
}  // namespace vnhgcn
