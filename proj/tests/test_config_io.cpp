#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ccme/config.hpp"
#include "ccme/io.hpp"

using namespace ccme;

TEST(Config, AssignmentParsing)
{
    Config c;
    c.set_assignment("  epsilon_cm =  8000 ");
    c.set_assignment("em_shape=\"flat\"");
    EXPECT_EQ(c.get("epsilon_cm"), "8000");
    EXPECT_EQ(c.get("em_shape"), "flat");
    EXPECT_THROW(c.set_assignment("no_equals_sign"), ConfigError);
    EXPECT_THROW(c.set_assignment("=3"), ConfigError);
}

TEST(Config, MergeTextSkipsCommentsAndLaterWins)
{
    Config c;
    c.merge_text("# header\nnu0_cm = 300  # trailing\n\nnu0_cm = 350\n");
    EXPECT_EQ(c.get("nu0_cm"), "350");
    EXPECT_EQ(c.values().size(), 1u);
}

TEST(Config, DefaultFileMatchesBuiltInDefaults)
{
    Config c;
    c.merge_file(DEFAULT_CONFIG);
    const Settings from_file = resolve_settings(c);
    const Settings builtin = resolve_settings(Config{});
    EXPECT_EQ(from_file.describe(), builtin.describe());
}

TEST(Config, MissingFileIsConfigError)
{
    Config c;
    EXPECT_THROW(c.merge_file("/nonexistent/ccme.toml"), ConfigError);
}

TEST(ResolveSettings, Defaults)
{
    const Settings s = resolve_settings(Config{});
    EXPECT_DOUBLE_EQ(s.params.epsilon_cm, 8065.0);
    EXPECT_DOUBLE_EQ(s.params.alpha_cm, 806.5);
    EXPECT_DOUBLE_EQ(s.params.gamma0_per_ps, 0.01);
    EXPECT_EQ(s.T_EM_grid_K.size(), 12u);
    EXPECT_DOUBLE_EQ(s.T_EM_grid_K.front(), 300.0);
    EXPECT_DOUBLE_EQ(s.T_EM_grid_K.back(), 60000.0);
    EXPECT_EQ(s.mode, ModeSelection::Both);
}

TEST(ResolveSettings, OverridesAndAliases)
{
    Config c;
    c.set("lifetime_ps", "50");
    c.set("alpha_cm", "1613");
    c.set("em_gap_convention", "signed");
    c.set("alpha_grid", "[0.1, 0.2]");
    c.set("mode", "additive");
    const Settings s = resolve_settings(c);
    EXPECT_DOUBLE_EQ(s.params.gamma0_per_ps, 0.02);
    EXPECT_NEAR(s.alpha_over_epsilon, 0.2, 1e-15);
    EXPECT_EQ(s.params.em_gap, EmGapConvention::Signed);
    EXPECT_EQ(s.alpha_grid, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(s.mode, ModeSelection::Additive);
}

TEST(ResolveSettings, Errors)
{
    auto fails = [](std::initializer_list<std::pair<const char*, const char*>> kv) {
        Config c;
        for (const auto& [k, v] : kv) c.set(k, v);
        EXPECT_THROW(resolve_settings(c), ConfigError) << kv.begin()->first;
    };
    fails({{"no_such_key", "1"}});
    fails({{"epsilon_cm", "abc"}});
    fails({{"epsilon_cm", "8065x"}});
    fails({{"epsilon_cm", "-1"}});
    fails({{"fock_dim", "2.5"}});
    fails({{"alpha_cm", "100"}, {"alpha_over_epsilon", "0.1"}});
    fails({{"alpha_grid", "0.2, 0.1"}});
    fails({{"alpha_grid", ""}});
    fails({{"em_shape", "square"}});
    fails({{"mode", "sideways"}});
    fails({{"fock_dim", "30"}, {"fock_max", "20"}});
    fails({{"lifetime_ps", "0"}});
    fails({{"include_residual_counterterm", "maybe"}});
    fails({{"T_EM_grid_K", "0, 100"}});
}

TEST(Grids, LogGridEndpointsAndSpacing)
{
    const auto g = log_grid(300.0, 60000.0, 12);
    EXPECT_EQ(g.front(), 300.0);
    EXPECT_EQ(g.back(), 60000.0);
    for (std::size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
    EXPECT_EQ(parse_list("x", "1,2, 3"), (std::vector<double>{1, 2, 3}));
    EXPECT_TRUE(parse_bool("x", "Yes"));
    EXPECT_FALSE(parse_bool("x", "off"));
}

TEST(Csv, FormatIsStable)
{
    CsvTable t;
    t.add_meta("code_version", "1.0.0");
    t.columns = {{"t", "ps"}, {"population", "1"}};
    t.add_row({0.0, 1.0});
    t.add_row({0.1, 1.0 / 3.0});
    EXPECT_EQ(t.str(), "# code_version = 1.0.0\nt [ps],population [1]\n0,1\n0.1,0.333333333333\n");
    EXPECT_THROW(t.add_row({1.0}), DimensionMismatch);
    EXPECT_EQ(t.column(1).size(), 2u);
}

TEST(Csv, NumberFormatting)
{
    EXPECT_EQ(format_number(1e-17), "1e-17");
    EXPECT_EQ(format_number(8065.0), "8065");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Files, AtomicWriteLeavesNoTemporary)
{
    const auto dir = std::filesystem::temp_directory_path() / "ccme_io_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "sub" / "out.csv";
    write_file_atomically(path, "a,b\n");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "a,b\n");
    EXPECT_FALSE(std::filesystem::exists(dir / "sub" / "out.csv.tmp"));
    std::filesystem::remove_all(dir);
}

TEST(Svg, WellFormedAndDeterministic)
{
    LinePlot plot;
    plot.title = "rate <vs> alpha & more";
    plot.x_label = "x";
    plot.y_label = "y";
    plot.log_x = true;
    plot.series.push_back({"a", {1.0, 10.0, 100.0}, {0.1, 0.2, 0.3}, false});
    plot.series.push_back({"b", {1.0, 10.0, 100.0}, {0.3, 0.2, 0.1}, true});
    plot.reference_lines.push_back(0.25);
    const std::string svg = plot.svg();
    EXPECT_EQ(svg, plot.svg());
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("&lt;vs&gt; alpha &amp; more"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
}
