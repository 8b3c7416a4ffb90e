#ifndef DSER_RELATIONS_HPP
#define DSER_RELATIONS_HPP

#include <optional>
#include <string>
#include <utility>

#include "dser/grouplab.hpp"
#include "dser/rng.hpp"
#include "dser/transvect.hpp"

namespace dser {

// The ten commutator identities among rank-one generators.  The first five
// hold for arbitrary distinct indices; the "p-" forms pin one index to the
// top hyperbolic slot m and are the shapes used to rewrite sub-m atoms.
enum class RelId { I, II, III, IV, V, PI, PII, PIII, PIV, PV };

const char* rel_name(RelId id);                     // "i" ... "v", "p-i" ...
std::optional<RelId> rel_parse(const std::string&); // inverse of rel_name
std::vector<RelId> all_relations();

// Smallest m for which the identity has admissible indices.
int relation_min_m(RelId id);

// One concrete instance: the participating hyperbolic indices, the formal
// second subscripts (bookkeeping tags), and the free parameter vectors in
// recipe order.  corrupt_derived negates the first derived parameter, which
// must break the identity whenever that parameter is nonzero.
struct RelationCase {
    RelId id = RelId::I;
    int i = 0, j = 0, t = 0;       // 1-based hyperbolic indices
    int k = 1, l = 1, r = 1, s = 1;  // formal tags, never affect matrices
    std::vector<Vec> params;       // free length-n vectors, recipe order
    bool corrupt_derived = false;
};

RelationCase random_relation_case(const QuadSetup& S, RelId id, Rng& rng);

// Formal words for the two sides.  Throws std::invalid_argument
// ("index constraint") when the indices violate the side conditions.
std::pair<GenWord, GenWord> relation_words(const QuadSetup& S,
                                           const RelationCase& rc);

bool relation_holds(const QuadSetup& S, const RelationCase& rc);

// Compact JSON description of a case (for failure reports).
std::string describe_case(const QuadSetup& S, const RelationCase& rc);

struct RelationBatch {
    RelId id = RelId::I;
    int trials = 0;
    int failures = 0;
    std::string first_failure;  // empty when all trials held
};

RelationBatch verify_relation(const QuadSetup& S, RelId id, int trials,
                              Rng& rng, bool corrupt = false);

// The atoms carrying index m, together with the paired two-index shapes,
// generate the same group as the full atom set.  Finite rings only.
struct ClosureCheck {
    size_t top_count = 0;
    size_t full_count = 0;
    bool equal = false;
};

// Throws std::invalid_argument("nothing to generate") when m = 0.
ClosureCheck generator_closure_check(const QuadSetup& S,
                                     size_t budget = closure_budget());

}  // namespace dser

#endif
