#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "storycheck/io.hpp"

using storycheck::testing::fixture;

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(STORYCHECK_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string f(const std::string& name) { return fixture(name); }

std::string intro(const std::string& model) {
    return "scenario --model " + f(model) + " --poset1 " + f("ax.poset.json") + " --event1 eAX --poset2 " +
           f("ay.poset.json") + " --event2 eAY --mode prevention";
}

std::string temp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("storycheck_cli_" + name)).string();
}

}  // namespace

TEST(Cli, IntroPreventionHasNoScenario) {
    Outcome r = run(intro("fig2.model.json"));
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("pushout obstruction at A.site3"), std::string::npos) << r.out;
}

TEST(Cli, RelaxedPreventionWritesDot) {
    std::string dot = temp("fig3.dot");
    std::filesystem::remove(dot);
    Outcome r = run(intro("fig3.model.json") + " --dot " + dot);
    EXPECT_EQ(r.code, 0) << r.out;
    std::string text = storycheck::read_text_file(dot);
    EXPECT_EQ(text.rfind("graph \"scenario1\" {", 0), 0u);
    EXPECT_EQ(text.find("scenario2"), std::string::npos);
    EXPECT_NE(text.find("a0:s3 -- a1:s0;"), std::string::npos);
    Outcome again = run(intro("fig3.model.json") + " --dot " + dot + "2");
    EXPECT_EQ(storycheck::read_text_file(dot + "2"), text);
}

TEST(Cli, AbstractFourStepTrace) {
    Outcome r = run("abstract --trace " + f("fig6.trace.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    using P = std::vector<std::vector<std::string>>;
    EXPECT_EQ(j["lt"].get<P>(), (P{{"e1", "e2"}, {"e1", "e3"}, {"e2", "e4"}, {"e3", "e4"}}));
    EXPECT_EQ(j["turnstile"].get<P>(), (P{{"e2", "e3"}}));
}

TEST(Cli, ScenarioAllCountsTwoResourceModel) {
    std::string base = "--json scenario --all --model " + f("resources.model.json") + " --poset2 " +
                       f("resources_ay.poset.json") + " --event1 eAX --event2 eAY --poset1 ";
    Outcome loose = run(base + f("resources_ax.poset.json"));
    ASSERT_EQ(loose.code, 0) << loose.out;
    EXPECT_EQ(nlohmann::json::parse(loose.out)["scenarios"].size(), 2u);
    Outcome strict = run(base + f("resources_ax_strict.poset.json"));
    ASSERT_EQ(strict.code, 0) << strict.out;
    EXPECT_EQ(nlohmann::json::parse(strict.out)["scenarios"].size(), 1u);
}

TEST(Cli, CheckExitCodes) {
    std::string posets = " --poset AX=" + f("ax.poset.json") + " --poset AY=" + f("ay.poset.json");
    const std::string formula = " --formula 'exists e. prevents(e in AX, AY.eAY in AY)'";
    EXPECT_EQ(run("check --model " + f("fig2.model.json") + posets + formula).code, 1);
    Outcome yes = run("check --model " + f("fig3.model.json") + posets + formula);
    EXPECT_EQ(yes.code, 0) << yes.out;
    Outcome open = run("check --model " + f("fig3.model.json") + posets +
                       " --formula 'prevents(e in AX, AY.eAY in AY)'");
    EXPECT_EQ(open.code, 0) << open.out;
    EXPECT_NE(open.out.find("e = AX.eAX"), std::string::npos) << open.out;
}

TEST(Cli, JsonErrors) {
    Outcome bad = run("--json check --model " + f("fig2.model.json") + " --poset AX=" + f("ax.poset.json") +
                  " --formula 'exists e. (e |-[AX]'");
    EXPECT_EQ(bad.code, 2);
    auto j = nlohmann::json::parse(bad.out);
    EXPECT_EQ(j["error"], "SyntaxError");
    Outcome missing = run("--json validate --model /nonexistent.json");
    EXPECT_EQ(missing.code, 2);
    EXPECT_EQ(nlohmann::json::parse(missing.out)["error"], "InputError");
    Outcome usage = run("scenario --json --model x");
    EXPECT_EQ(usage.code, 2);
    EXPECT_EQ(nlohmann::json::parse(usage.out)["error"], "UsageError");
    EXPECT_EQ(run("frobnicate").code, 2);
    Outcome event = run(intro("fig2.model.json") + " --event1 nope");
    EXPECT_EQ(event.code, 2);
}

TEST(Cli, CausalityAndInfluenceTables) {
    Outcome c = run("--json causality --trace " + f("fig6.trace.json"));
    ASSERT_EQ(c.code, 0) << c.out;
    auto j = nlohmann::json::parse(c.out);
    using P = std::vector<std::vector<std::size_t>>;
    EXPECT_EQ(j["enables"].get<P>(), (P{{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
    EXPECT_EQ(j["prevents"].get<P>(), (P{{2, 1}}));
    Outcome i = run("--json influence --model " + f("fig6.model.json"));
    ASSERT_EQ(i.code, 0) << i.out;
    EXPECT_EQ(nlohmann::json::parse(i.out).size(), 16u);
}

TEST(Cli, ApplyAndValidateRoundTrip) {
    std::string out = temp("apply.trace.json");
    Outcome a = run("apply --model " + f("fig6.model.json") + " --rule r1");
    ASSERT_EQ(a.code, 0) << a.out;
    std::ofstream(out) << a.out;
    Outcome v = run("validate --model " + f("fig6.model.json") + " --trace " + out);
    EXPECT_EQ(v.code, 0) << v.out;
    EXPECT_NE(v.out.find("trace of 1 transitions"), std::string::npos);
    EXPECT_EQ(run("apply --model " + f("fig6.model.json") + " --rule r4").code, 1);
}

TEST(Cli, ConcretizeHonoursBudget) {
    std::string poset = f("resources_ax.poset.json");
    Outcome ok = run("concretize --model " + f("resources.model.json") + " --poset " + poset);
    ASSERT_EQ(ok.code, 0) << ok.out;
    EXPECT_GE(nlohmann::json::parse(ok.out)["solutions"].size(), 1u);
    Outcome tight = run("--json concretize --model " + f("resources.model.json") + " --poset " + poset,
                    "POSET_SEARCH_BUDGET=1");
    EXPECT_EQ(tight.code, 2) << tight.out;
    EXPECT_EQ(nlohmann::json::parse(tight.out)["error"], "BudgetExhausted");
}
