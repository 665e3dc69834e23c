#include "perfminer/categorize.hpp"

#include "perfminer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace perfminer {

std::vector<CategoryPair> assign_category(LlmGateway& gateway, const CommitRecord& record,
                                          const Taxonomy& taxonomy, unsigned max_tokens) {
    std::string prompt = build_categorization_prompt(record, taxonomy);
    Completion completion = gateway.complete(prompt, max_tokens);
    return parse_category_response(completion.text, taxonomy);
}

void CategoryCounts::add(Language lang, const CategoryPair& pair, std::uint64_t n) {
    counts[{lang, pair.first, pair.second}] += n;
    totals[lang] += n;
}

SignificanceTable significance(const CategoryCounts& counts, const Taxonomy& taxonomy) {
    SignificanceTable table;
    for (const auto& [lang, total] : counts.totals) {
        if (total == 0) throw ConfigError("significance: zero total for " + to_string(lang));
        table.languages.push_back(lang);
        for (const auto& cat : taxonomy.categories) {
            for (const auto& sub : cat.subcategories) {
                auto it = counts.counts.find({lang, cat.name, sub.name});
                std::uint64_t count = it == counts.counts.end() ? 0 : it->second;
                table.entries[{lang, sub.name}] =
                    static_cast<double>(count) / static_cast<double>(total);
            }
        }
    }
    return table;
}

double round_2dp_half_up(double x) {
    return std::floor(x * 100.0 + 0.5) / 100.0;
}

std::vector<RankedSubcategory> top_k_report(const SignificanceTable& table, Language language,
                                            const Taxonomy& taxonomy, std::size_t k) {
    if (k == 0) throw ConfigError("top_k_report: k must be >= 1");
    if (std::find(table.languages.begin(), table.languages.end(), language) ==
        table.languages.end())
        throw ConfigError("top_k_report: no counts for language " + to_string(language));

    struct Row {
        std::string sub;
        double sigma;
        std::size_t taxonomy_pos;
    };
    std::vector<Row> rows;
    std::size_t pos = 0;
    for (const auto& cat : taxonomy.categories) {
        for (const auto& sub : cat.subcategories) {
            auto it = table.entries.find({language, sub.name});
            double sigma = it == table.entries.end() ? 0.0 : it->second;
            rows.push_back({sub.name, sigma, pos++});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.sigma != b.sigma) return a.sigma > b.sigma;
        return a.taxonomy_pos < b.taxonomy_pos;
    });

    std::vector<RankedSubcategory> out;
    for (std::size_t i = 0; i < rows.size() && i < k; ++i)
        out.push_back({rows[i].sub, round_2dp_half_up(rows[i].sigma), rows[i].sigma});
    return out;
}

void write_counts_csv(const CategoryCounts& counts, const Taxonomy& taxonomy, std::ostream& out) {
    out << "language,category,subcategory,count,sigma\n";
    SignificanceTable table = significance(counts, taxonomy);
    for (const auto& [lang, total] : counts.totals) {
        for (const auto& cat : taxonomy.categories) {
            for (const auto& sub : cat.subcategories) {
                auto it = counts.counts.find({lang, cat.name, sub.name});
                std::uint64_t count = it == counts.counts.end() ? 0 : it->second;
                char sigma[32];
                std::snprintf(sigma, sizeof(sigma), "%.6f", table.entries.at({lang, sub.name}));
                out << to_string(lang) << ",\"" << cat.name << "\",\"" << sub.name << "\","
                    << count << ',' << sigma << '\n';
            }
        }
    }
}

void write_top_k_table(const SignificanceTable& table, const Taxonomy& taxonomy, std::size_t k,
                       std::ostream& out) {
    for (Language lang : table.languages) {
        out << to_string(lang) << '\n';
        for (const RankedSubcategory& row : top_k_report(table, lang, taxonomy, k)) {
            char sigma[16];
            std::snprintf(sigma, sizeof(sigma), "%.2f", row.sigma_rounded);
            out << "  " << sigma << "  " << row.subcategory << '\n';
        }
    }
}

} // namespace perfminer
