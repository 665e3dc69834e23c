#include "perfminer/diff.hpp"
#include "perfminer/errors.hpp"

#include <doctest.h>

using namespace perfminer;

namespace {

const char* kPythonSingle =
    "diff --git a/pkg/util.py b/pkg/util.py\n"
    "index 1111111..2222222 100644\n"
    "--- a/pkg/util.py\n"
    "+++ b/pkg/util.py\n"
    "@@ -10,4 +10,3 @@ def slow_sum(items):\n"
    "     total = 0\n"
    "-    for it in items:\n"
    "-        total = total + it\n"
    "+    total = sum(items)\n"
    "     return total\n";

const char* kTwoFunctions =
    "--- a/engine.cc\n"
    "+++ b/engine.cc\n"
    "@@ -3,3 +3,3 @@ int lookup(const std::vector<int>& xs, int key) {\n"
    "     int i = 0;\n"
    "-    i = find_slow(xs, key);\n"
    "+    i = find_fast(xs, key);\n"
    "     return i;\n"
    "@@ -20,2 +20,2 @@ int scale(int v) {\n"
    "     int r;\n"
    "-    r = v * 2;\n"
    "+    r = v << 1;\n";

const char* kReadmeOnly =
    "--- a/README.md\n"
    "+++ b/README.md\n"
    "@@ -1,1 +1,2 @@\n"
    " # project\n"
    "+New docs line.\n";

} // namespace

TEST_CASE("unified diff parsing: files, hunks, bodies") {
    auto files = parse_unified_diff(kPythonSingle);
    REQUIRE(files.size() == 1);
    CHECK(files[0].old_path == "pkg/util.py");
    CHECK(files[0].new_path == "pkg/util.py");
    REQUIRE(files[0].hunks.size() == 1);
    const DiffHunk& hunk = files[0].hunks[0];
    CHECK(hunk.old_start == 10);
    CHECK(hunk.old_count == 4);
    CHECK(hunk.new_count == 3);
    CHECK(hunk.context == "def slow_sum(items):");
    CHECK(hunk.lines.size() == 5);
}

TEST_CASE("hunk body longer or shorter than header is an error") {
    CHECK_THROWS_AS(parse_unified_diff("--- a/x.py\n+++ b/x.py\n@@ -1,2 +1,1 @@\n-a\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_unified_diff("--- a/x.py\n+++ b/x.py\n@@ -1,1 +1,1 @@\n-a\n+b\n+c\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_unified_diff("--- a/x.py\n+++ b/x.py\n@@ bogus @@\n"), ParseError);
}

TEST_CASE("removed lines starting with dashes stay inside the hunk body") {
    // "---" as deleted content must not be mistaken for a file header.
    const char* tricky =
        "--- a/notes.py\n"
        "+++ b/notes.py\n"
        "@@ -1,3 +1,1 @@ def block():\n"
        "-----\n"
        "---x\n"
        " keep\n";
    auto files = parse_unified_diff(tricky);
    REQUIRE(files.size() == 1);
    REQUIRE(files[0].hunks.size() == 1);
    CHECK(files[0].hunks[0].lines.size() == 3);
}

TEST_CASE("language detection from extensions") {
    CHECK(language_from_path("a/b/c.py") == Language::Python);
    CHECK(language_from_path("x.cc") == Language::Cpp);
    CHECK(language_from_path("x.hpp") == Language::Cpp);
    CHECK(language_from_path("X.JAVA") == Language::Java);
    CHECK_FALSE(language_from_path("README.md").has_value());
    CHECK_FALSE(language_from_path("Makefile").has_value());
}

TEST_CASE("single python function attributes to one name") {
    FunctionCount fc = count_changed_functions(kPythonSingle);
    CHECK(fc.count == 1);
    REQUIRE(fc.changes.size() == 1);
    CHECK(fc.changes[0].file_path == "pkg/util.py");
    CHECK(fc.changes[0].function_name == "slow_sum");
}

TEST_CASE("two touched functions count separately") {
    FunctionCount fc = count_changed_functions(kTwoFunctions);
    CHECK(fc.count == 2);
    CHECK(fc.changes[0].function_name == "lookup");
    CHECK(fc.changes[1].function_name == "scale");
}

TEST_CASE("readme-only diffs yield one anonymous function") {
    FunctionCount fc = count_changed_functions(kReadmeOnly);
    CHECK(fc.count == 1);
    REQUIRE(fc.changes.size() == 1);
    CHECK(fc.changes[0].function_name.empty());
}

TEST_CASE("one hunk spanning two functions is still two functions") {
    const char* merged =
        "--- a/m.py\n"
        "+++ b/m.py\n"
        "@@ -1,5 +1,5 @@\n"
        " def first(a):\n"
        "-    return a + a\n"
        "+    return 2 * a\n"
        " \n"
        " def second(b):\n"
        "-    return b ** 2\n"
        "+    return b * b\n";
    FunctionCount fc = count_changed_functions(merged);
    CHECK(fc.count == 2);
    CHECK(fc.changes[0].function_name == "first");
    CHECK(fc.changes[1].function_name == "second");
}

TEST_CASE("header context seeds attribution when the hunk shows no signature") {
    const char* body_only =
        "--- a/deep.cc\n"
        "+++ b/deep.cc\n"
        "@@ -40,2 +40,2 @@ static int helper(int* data, int n) {\n"
        "     int acc = 0;\n"
        "-    acc = walk(data, n);\n"
        "+    acc = walk_fast(data, n);\n";
    FunctionCount fc = count_changed_functions(body_only);
    CHECK(fc.count == 1);
    CHECK(fc.changes[0].function_name == "helper");
}

TEST_CASE("python function extraction by indentation") {
    std::string source =
        "import os\n"
        "\n"
        "def alpha(x):\n"
        "    if x:\n"
        "        return 1\n"
        "    return 0\n"
        "\n"
        "def beta(y):\n"
        "    return y\n";
    auto alpha = extract_function(source, "alpha", Language::Python);
    REQUIRE(alpha.has_value());
    CHECK(*alpha == "def alpha(x):\n    if x:\n        return 1\n    return 0");
    auto beta = extract_function(source, "beta", Language::Python);
    REQUIRE(beta.has_value());
    CHECK(*beta == "def beta(y):\n    return y");
    CHECK_FALSE(extract_function(source, "gamma", Language::Python).has_value());
}

TEST_CASE("c-like extraction tracks braces and skips calls") {
    std::string source =
        "#include <vector>\n"
        "\n"
        "int helper(int a);\n"
        "\n"
        "int helper(int a) {\n"
        "    if (a > 0) { return a; }\n"
        "    return -a;\n"
        "}\n"
        "\n"
        "int driver() {\n"
        "    // helper(0) in a comment stays out of it\n"
        "    return helper(3) + 1;\n"
        "}\n";
    auto helper = extract_function(source, "helper", Language::Cpp);
    REQUIRE(helper.has_value());
    CHECK(helper->find("return -a;") != std::string::npos);
    CHECK(helper->front() == 'i');
    CHECK(helper->back() == '}');
    // The declaration and the call site are not bodies.
    CHECK(helper->find("helper(3)") == std::string::npos);

    auto driver = extract_function(source, "driver", Language::Cpp);
    REQUIRE(driver.has_value());
    CHECK(driver->find("helper(3)") != std::string::npos);
}

TEST_CASE("extraction handles braces inside strings and comments") {
    std::string source =
        "std::string format(int n) {\n"
        "    /* weird { */\n"
        "    return std::string(\"{\") + std::to_string(n) + \"}\"; // }\n"
        "}\n";
    auto fn = extract_function(source, "format", Language::Cpp);
    REQUIRE(fn.has_value());
    CHECK(fn->back() == '}');
    CHECK(fn->find("to_string") != std::string::npos);
}

TEST_CASE("qualified names extract by their last segment") {
    std::string source =
        "int Widget::resize(int w) {\n"
        "    cache_.clear();\n"
        "    return w;\n"
        "}\n";
    auto fn = extract_function(source, "Widget::resize", Language::Cpp);
    REQUIRE(fn.has_value());
    CHECK(fn->find("cache_.clear()") != std::string::npos);
}

TEST_CASE("java method extraction with throws clause") {
    std::string source =
        "class Store {\n"
        "    public int load(String key) throws IOException {\n"
        "        return backend.get(key);\n"
        "    }\n"
        "}\n";
    auto fn = extract_function(source, "load", Language::Java);
    REQUIRE(fn.has_value());
    CHECK(fn->find("backend.get") != std::string::npos);
}
