#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/llm_gateway.hpp"
#include "perfminer/taxonomy.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace perfminer {

using CategoryPair = std::pair<std::string, std::string>;  // (category, subcategory)

// One chain-of-thought categorization call; multi-label output permitted.
// Gateway and parse errors propagate per record.
std::vector<CategoryPair> assign_category(LlmGateway& gateway, const CommitRecord& record,
                                          const Taxonomy& taxonomy, unsigned max_tokens = 256);

struct CategoryCounts {
    // (language, category, subcategory) -> count. Every assigned pair adds
    // one count, so per-language counts sum to the language total.
    std::map<std::tuple<Language, std::string, std::string>, std::uint64_t> counts;
    std::map<Language, std::uint64_t> totals;

    void add(Language lang, const CategoryPair& pair, std::uint64_t n = 1);
};

struct SignificanceTable {
    // (language, subcategory) -> sigma, stored as the exact ratio.
    std::map<std::pair<Language, std::string>, double> entries;
    std::vector<Language> languages;
};

// sigma = count / language total, exact division, no rounding stored.
SignificanceTable significance(const CategoryCounts& counts, const Taxonomy& taxonomy);

struct RankedSubcategory {
    std::string subcategory;
    double sigma_rounded = 0.0;  // 2 decimal places, round half up
    double sigma_exact = 0.0;
};

// Top k subcategories by exact sigma, descending; exact ties resolved by
// taxonomy order. Rounding is presentation-only.
std::vector<RankedSubcategory> top_k_report(const SignificanceTable& table, Language language,
                                            const Taxonomy& taxonomy, std::size_t k = 5);

double round_2dp_half_up(double x);

// CSV: language,category,subcategory,count,sigma
void write_counts_csv(const CategoryCounts& counts, const Taxonomy& taxonomy, std::ostream& out);
// Aligned text table of per-language top-k blocks.
void write_top_k_table(const SignificanceTable& table, const Taxonomy& taxonomy, std::size_t k,
                       std::ostream& out);

} // namespace perfminer
