// Copyright 2026 The Toolvis Authors
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

#include "toolvis/toolprog.hpp"

namespace toolvis {
namespace {

Raster gradient(int w, int h) {
  Canvas c(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      c.set(x, y, Rgb{static_cast<std::uint8_t>(x * 13), static_cast<std::uint8_t>(y * 29),
                      static_cast<std::uint8_t>(x * y)});
    }
  }
  return std::move(c).finish();
}

std::string parse_message(std::string_view src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return std::string(e.what()) + " @" + std::to_string(e.span().line) + ":" +
           std::to_string(e.span().column);
  }
  return "no error";
}

TEST(ParseTest, MinimalProgram) {
  const ToolProgram p = parse("rotate90()");
  ASSERT_EQ(p.calls.size(), 1u);
  EXPECT_EQ(p.calls[0].tool, "rotate90");
  EXPECT_TRUE(p.calls[0].args.empty());
}

TEST(ParseTest, TwoCallsInOrder) {
  const ToolProgram p = parse("crop(x0=10, y0=20, x1=50, y1=80) | grayscale()");
  ASSERT_EQ(p.calls.size(), 2u);
  EXPECT_EQ(p.calls[0].tool, "crop");
  ASSERT_EQ(p.calls[0].args.size(), 4u);
  EXPECT_EQ(p.calls[0].args[1].name, "y0");
  EXPECT_EQ(std::get<std::int64_t>(p.calls[0].args[3].value), 80);
  EXPECT_EQ(p.calls[1].tool, "grayscale");
  EXPECT_EQ(p.calls[1].span.offset, 35u);
}

TEST(ParseTest, NewlineSeparatesAndAliases) {
  const ToolProgram p = parse("flip_horizontal()\n  brightness(factor=1.5)");
  ASSERT_EQ(p.calls.size(), 2u);
  EXPECT_EQ(p.calls[0].tool, "flip-horizontal");
  EXPECT_DOUBLE_EQ(std::get<double>(p.calls[1].args[0].value), 1.5);
  EXPECT_EQ(p.calls[1].span.line, 2);
  EXPECT_EQ(p.calls[1].span.column, 3);
}

TEST(ParseTest, StringsAndNegatives) {
  const ToolProgram p = parse(R"(note(text="a \"b\"\n", n=-4))");
  EXPECT_EQ(std::get<std::string>(p.calls[0].args[0].value), "a \"b\"\n");
  EXPECT_EQ(std::get<std::int64_t>(p.calls[0].args[1].value), -4);
}

TEST(ParseTest, GoldenErrors) {
  EXPECT_EQ(parse_message("crop(x0=10"), "unclosed '(' in call to 'crop' @1:5");
  EXPECT_EQ(parse_message(""), "empty program: expected a tool call @1:1");
  EXPECT_EQ(parse_message("rotate90"),
            "expected '(' after tool name 'rotate90' but found end of input @1:9");
  EXPECT_EQ(parse_message("rotate90() |"), "expected a tool call after '|' @1:13");
  EXPECT_EQ(parse_message("a() || b()"), "expected a tool call between '|' separators @1:6");
  EXPECT_EQ(parse_message("a() b()"), "expected '|' or newline between calls but found 'b' @1:5");
  EXPECT_EQ(parse_message("crop(x0=1,x0=2)"), "duplicate argument 'x0' in call to 'crop' @1:11");
  EXPECT_EQ(parse_message("blur(radius=)"),
            "expected a number or string for argument 'radius' in call to 'blur' but found ')' @1:13");
  EXPECT_EQ(parse_message("blur(radius=1.)"),
            "expected digits after '.' in argument 'radius' in call to 'blur' @1:15");
  EXPECT_EQ(parse_message("blur(radius=1 )"),
            "expected ',' or ')' in call to 'blur' but found ' ' @1:14");
  EXPECT_EQ(parse_message("Rotate90()"), "expected tool name but found 'R' @1:1");
  EXPECT_EQ(parse_message("x(s=\"abc)"), "unterminated string in call to 'x' @1:5");
  EXPECT_EQ(parse_message("x(v=99999999999999999999)"),
            "integer literal 99999999999999999999 is out of range @1:5");
  EXPECT_EQ(parse_message("x(v=1e5)"), "expected ',' or ')' in call to 'x' but found 'e' @1:6");
}

TEST(ParseTest, RoundTrip) {
  for (const char* src : {"rotate90()", "crop(x0=0.25, y0=0, x1=1.0, y1=7) | sharpen()",
                          "t(s=\"q\\\"x\", n=-3)\nblur(radius=3)"}) {
    const ToolProgram p = parse(src);
    EXPECT_EQ(parse(render(p)), p) << src;
  }
  EXPECT_EQ(render(parse("crop(x0=1,y0=2, x1=3,   y1=4)|grayscale()")),
            "crop(x0=1, y0=2, x1=3, y1=4) | grayscale()");
}

TEST(ParseTest, FuzzNeverEscapes) {
  std::mt19937_64 gen(5);
  const std::string alphabet = "abxyz019()=,|\"\\ \n.-_";
  for (int i = 0; i < 50000; ++i) {
    std::string s(gen() % 20, ' ');
    for (char& c : s) c = gen() % 4 ? alphabet[gen() % alphabet.size()] : static_cast<char>(gen());
    try {
      const ToolProgram p = parse(s);
      ASSERT_FALSE(p.calls.empty());
      ASSERT_EQ(parse(render(p)), p) << s;
    } catch (const ParseError& e) {
      ASSERT_FALSE(std::string(e.what()).empty());
      ASSERT_GE(e.span().line, 1);
    }
  }
}

TEST(RegistryTest, Lookups) {
  const ToolRegistry reg = ToolRegistry::builtin();
  ASSERT_NE(reg.find("rotate180"), nullptr);
  EXPECT_TRUE(reg.find("rotate180")->args.empty());
  const ToolDef* c = reg.find("crop");
  ASSERT_NE(c, nullptr);
  ASSERT_EQ(c->args.size(), 4u);
  const char* names[] = {"x0", "y0", "x1", "y1"};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(c->args[static_cast<std::size_t>(i)].name, names[i]);
    EXPECT_TRUE(c->args[static_cast<std::size_t>(i)].required);
    EXPECT_EQ(c->args[static_cast<std::size_t>(i)].type, ArgType::kInt);
  }
  EXPECT_NE(reg.find("flip_vertical"), nullptr);
  EXPECT_EQ(reg.names().size(), 12u);
  EXPECT_EQ(reg.names().front(), "rotate90");
  EXPECT_EQ(signature(*c), "crop(x0: int, y0: int, x1: int, y1: int)");
}

TEST(RegistryTest, DuplicateAndExtension) {
  ToolRegistry reg = ToolRegistry::builtin();
  ToolDef dup = *reg.find("grayscale");
  try {
    reg.add(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateTool);
  }
  ToolDef invert{"invert", {}, "invert channels", ToolCategory::kEnhancement, std::nullopt,
                 [](const Raster& img, const ResolvedArgs&, const ExecOptions&) {
                   Canvas c(img.width(), img.height());
                   for (int y = 0; y < img.height(); ++y) {
                     for (int x = 0; x < img.width(); ++x) {
                       const Rgb p = img.at(x, y);
                       c.set(x, y, Rgb{static_cast<std::uint8_t>(255 - p.r),
                                       static_cast<std::uint8_t>(255 - p.g),
                                       static_cast<std::uint8_t>(255 - p.b)});
                     }
                   }
                   return ToolResult{std::move(c).finish(), std::nullopt};
                 }};
  reg.add(invert);
  const Raster img = gradient(4, 3);
  const ExecOutcome out = execute("invert() | invert()", img, reg);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.success().result, img);
}

TEST(ExecuteTest, InversePair) {
  const Raster img = gradient(5, 3);
  const ExecOutcome out = execute("rotate90() | rotate270()", img, ToolRegistry::builtin());
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.success().result, img);
  EXPECT_EQ(out.success().applied.size(), 2u);
}

TEST(ExecuteTest, UnknownToolListsRegistry) {
  const ExecOutcome out =
      execute("zoomin(x0=0,y0=0,x1=5,y1=5)", gradient(8, 8), ToolRegistry::builtin());
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.failure().kind, ExecErrorKind::kUnknownTool);
  for (const std::string& n : ToolRegistry::builtin().names()) {
    EXPECT_NE(out.failure().message.find(n), std::string::npos) << n;
  }
  EXPECT_EQ(out.failure().message,
            "unknown tool 'zoomin'; registered tools: rotate90, rotate180, rotate270, "
            "flip-horizontal, flip-vertical, crop, brightness, contrast, grayscale, blur, "
            "sharpen, edge-detect");
}

TEST(ExecuteTest, ContrastThenGrayscale) {
  const ExecOutcome out =
      execute("contrast(factor=1.3) | grayscale()", gradient(6, 6), ToolRegistry::builtin());
  ASSERT_TRUE(out.ok());
  ASSERT_EQ(out.success().applied.size(), 2u);
  EXPECT_EQ(out.success().applied[0].tool, "contrast");
  EXPECT_EQ(out.success().applied[1].tool, "grayscale");
  EXPECT_EQ(render_outcome(out), "EXEC OK applied=[contrast, grayscale]");
}

TEST(ExecuteTest, FailuresCarryPrefixAndSpan) {
  const ToolRegistry reg = ToolRegistry::builtin();
  const Raster img = gradient(10, 10);
  const ExecOutcome bad = execute("rotate90() | crop(x0=1, y0=1)", img, reg);
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.failure().kind, ExecErrorKind::kBadArgs);
  EXPECT_EQ(bad.failure().message, "crop: missing required argument 'x1'");
  EXPECT_EQ(bad.failure().applied_prefix.size(), 1u);
  EXPECT_EQ(bad.failure().span.offset, 13u);

  const ExecOutcome extra = execute("grayscale(level=2)", img, reg);
  EXPECT_EQ(extra.failure().message, "grayscale: unexpected argument 'level'");
  const ExecOutcome typed = execute("blur(radius=\"big\")", img, reg);
  EXPECT_EQ(typed.failure().message, "blur: argument 'radius' must be an integer, got \"big\"");
  const ExecOutcome range = execute("blur(radius=0)", img, reg);
  EXPECT_EQ(range.failure().kind, ExecErrorKind::kBadArgs);
  EXPECT_NE(range.failure().message.find("blur"), std::string::npos);

  const ExecOutcome empty = execute("crop(x0=20, y0=20, x1=30, y1=30)", img, reg);
  ASSERT_FALSE(empty.ok());
  EXPECT_EQ(empty.failure().kind, ExecErrorKind::kRuntimeError);
  EXPECT_EQ(empty.failure().message.rfind("crop: ", 0), 0u);

  const ExecOutcome strict = execute("crop(x0=5, y0=5, x1=30, y1=30)", img, reg,
                                     ExecOptions{CropMode::kStrict});
  EXPECT_EQ(strict.failure().kind, ExecErrorKind::kRuntimeError);
  const ExecOutcome clipped = execute("crop(x0=5, y0=5, x1=30, y1=30)", img, reg);
  ASSERT_TRUE(clipped.ok());
  EXPECT_EQ(clipped.success().applied[0].region, (BBox{5, 5, 10, 10}));

  const ExecOutcome syntax = execute("rotate90(", img, reg);
  EXPECT_EQ(syntax.failure().kind, ExecErrorKind::kParseError);
  EXPECT_EQ(render_outcome(syntax), "EXEC ERROR ParseError: unclosed '(' in call to 'rotate90' at 1:9");
}

TEST(ExecuteTest, RelativeCrop) {
  const Raster img = gradient(20, 10);
  const ExecOutcome out =
      execute("crop(x0=0.25, y0=0.0, x1=0.75, y1=0.5)", img, ToolRegistry::builtin());
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.success().applied[0].region, (BBox{5, 0, 15, 5}));
  // Integers mixed in keep absolute pixel coordinates.
  const ExecOutcome abs = execute("crop(x0=1, y0=0.0, x1=3, y1=1.0)", img, ToolRegistry::builtin());
  ASSERT_TRUE(abs.ok());
  EXPECT_EQ(abs.success().applied[0].region, (BBox{1, 0, 3, 1}));
}

TEST(ExecuteTest, ChainingEquivalence) {
  const ToolRegistry reg = ToolRegistry::builtin();
  const std::vector<std::string> calls = {
      "rotate90()", "rotate270()", "flip-vertical()", "crop(x0=1, y0=0, x1=4, y1=3)",
      "brightness(factor=0.5)", "grayscale()", "blur(radius=2)", "edge-detect()"};
  const Raster img = gradient(7, 5);
  for (const auto& a : calls) {
    for (const auto& b : calls) {
      const ExecOutcome chained = execute(a + " | " + b, img, reg);
      const ExecOutcome first = execute(a, img, reg);
      ASSERT_TRUE(first.ok());
      const ExecOutcome second = execute(b, first.success().result, reg);
      ASSERT_EQ(chained.ok(), second.ok());
      if (chained.ok()) {
        EXPECT_EQ(chained.success().result, second.success().result) << a << b;
      }
    }
  }
}

TEST(ExecuteTest, Deterministic) {
  const ToolRegistry reg = ToolRegistry::builtin();
  const Raster img = gradient(9, 9);
  const std::string prog = "sharpen() | contrast(factor=1.7) | rotate180() | crop(x0=2, y0=2, x1=7, y1=8)";
  EXPECT_EQ(execute(prog, img, reg), execute(prog, img, reg));
}

}  // namespace
}  // namespace toolvis
