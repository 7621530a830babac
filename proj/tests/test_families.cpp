#include <doctest.h>

#include "jsonvpa/families.hpp"
#include "jsonvpa/generator.hpp"

using namespace jsonvpa;

TEST_CASE("the adversarial conjunction family collapses to its last object shape") {
    Grammar g = worstcase_grammar(3);
    // only { k3: s } is valid
    DocumentTree valid = DocumentTree::object({{2, DocumentTree::primitive(Prim::Str)}});
    auto r = classical_validate(g, valid);
    CHECK(r.valid);
    // the conjunction forces far more schema evaluations than the document
    // has symbols
    CHECK(r.evaluations > valid.to_word().size());

    DocumentTree all_keys = DocumentTree::object({
        {0, DocumentTree::primitive(Prim::Str)},
        {1, DocumentTree::primitive(Prim::Str)},
        {2, DocumentTree::primitive(Prim::Str)},
    });
    CHECK_FALSE(classical_validate(g, all_keys).valid);
}

TEST_CASE("the permutation family accepts all orders of the full key set") {
    Grammar g = permutation_family(3);
    std::vector<KeyId> keys = {0, 1, 2};
    std::sort(keys.begin(), keys.end());
    int accepted = 0;
    do {
        DocumentTree::Object pairs;
        for (KeyId k : keys) {
            pairs.emplace_back(k, DocumentTree::primitive(Prim::Str));
        }
        accepted += classical_validate(g, DocumentTree::object(std::move(pairs))).valid;
    } while (std::next_permutation(keys.begin(), keys.end()));
    CHECK(accepted == 6);

    DocumentTree missing = DocumentTree::object({
        {0, DocumentTree::primitive(Prim::Str)},
        {1, DocumentTree::primitive(Prim::Str)},
    });
    CHECK_FALSE(classical_validate(g, missing).valid);

    CHECK(verify_subset_distinguishability(g, 3));
}
