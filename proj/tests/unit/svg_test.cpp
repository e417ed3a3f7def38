#include <gtest/gtest.h>

#include "nnrepair/error.hpp"
#include "nnrepair/svg.hpp"
#include "nnrepair/trainer.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

using testing::make_property;
using testing::q;

const Rect kBox{{-20, -20}, {20, 20}};

TEST(Svg, DeterministicAndWellFormed) {
  const Network net = init_network(std::vector<std::size_t>{2, 4, 2}, 3);
  const std::vector<LabeledPoint> train{{{1, 2}, 0}, {{-5, 3}, 1}};
  PlotOptions o;
  o.resolution = 32;
  o.train = train;
  const std::string a = boundary_svg(net, kBox, o);
  EXPECT_EQ(a, boundary_svg(net, kBox, o));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("<circle"), std::string::npos);
}

TEST(Svg, L1BallIsDiamondUnlessSquared) {
  const Network net = Network::zeros(std::vector<std::size_t>{2, 2, 2});
  const std::vector<RobustnessProperty> props{
      make_property("a<b", {q("0"), q("0")}, q("10"), Norm::kL1, 1)};
  PlotOptions o;
  o.resolution = 16;
  o.width_px = 400;
  o.properties = props;
  const std::string diamond = boundary_svg(net, kBox, o);
  // Center (0,0) maps to pixel (200,200); delta 10 is 100 px.
  EXPECT_NE(diamond.find("points=\"300.000,200.000 200.000,100.000 100.000,200.000 200.000,300.000\""),
            std::string::npos)
      << diamond;
  EXPECT_NE(diamond.find("<title>a&lt;b</title>"), std::string::npos);
  o.l1_as_square = true;
  const std::string square = boundary_svg(net, kBox, o);
  EXPECT_NE(square.find("points=\"100.000,300.000 300.000,300.000 300.000,100.000 100.000,100.000\""),
            std::string::npos)
      << square;
}

TEST(Svg, RejectsBadInput) {
  const Network net = Network::zeros(std::vector<std::size_t>{2, 2, 2});
  PlotOptions o;
  o.resolution = 8;
  EXPECT_THROW(boundary_svg(net, kBox, o), InvalidInputError);
  o.resolution = 16;
  EXPECT_THROW(boundary_svg(net, Rect{{0, 0}, {0, 1}}, o), InvalidInputError);
  EXPECT_THROW(boundary_svg(Network::zeros(std::vector<std::size_t>{3, 2, 2}), Rect{{0, 0, 0}, {1, 1, 1}}, o),
               InvalidInputError);
}

}  // namespace
}  // namespace nnrepair
