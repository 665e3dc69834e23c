#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace perfminer {

struct Subcategory {
    std::string name;
    std::string description;
};

struct TaxonomyCategory {
    std::string name;
    std::string description;
    std::vector<Subcategory> subcategories;
};

// Two-level performance-bug taxonomy. Order is significant: it is the
// tie-break order for ranked reports.
struct Taxonomy {
    std::vector<TaxonomyCategory> categories;

    bool has(const std::string& category, const std::string& subcategory) const;
    // Position of (category, subcategory) in flattened taxonomy order.
    std::optional<std::size_t> flat_index(const std::string& category,
                                          const std::string& subcategory) const;
    std::size_t subcategory_count() const;
};

// The built-in nine-category taxonomy.
Taxonomy default_taxonomy();

// Taxonomy file: `category: Name | description` lines, each followed by its
// `sub: Name | description` lines; '#' comments and blank lines ignored.
Taxonomy parse_taxonomy(std::string_view text);
Taxonomy load_taxonomy_file(const std::string& path);

} // namespace perfminer
