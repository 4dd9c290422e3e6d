// Walk-through on the comb and grid operators with mu1 = 2, mu2 = 4: chains
// through 0 for the line vectors, certificates for the branch vectors, and the
// scaled bilateral shift that both operators restrict to.
#include <iostream>

#include "chainrec/chainrec.hpp"

using namespace chainrec;

namespace {

void show(const char* title, const DeltaChain<Rational>& c) {
  std::cout << title << ": length " << c.length() << ", defect " << defect(c) << " < delta " << c.delta
            << (is_valid(c) ? " [valid]" : " [INVALID]") << "\n";
  auto g = link_defects(c);
  std::cout << "  link defects:";
  for (const auto& d : g) std::cout << " " << d;
  std::cout << "\n";
}

}  // namespace

int main() {
  const Rational mu1 = 2, mu2 = 4, delta = Rational(1, 10);
  const auto w = WeightAssignment<Rational>::standard(mu1, mu2);

  auto need = [&](OpFamily family) {
    return merge(requirement_for_basis<Rational>(0, delta, family, mu1, mu2, Direction::FromZero),
                 requirement_for_basis<Rational>(0, delta, family, mu1, mu2, Direction::ToZero));
  };
  auto req = need(OpFamily::CombShift);
  auto comb = share(shift_from_weights(build_comb_tree(req.minimal(TreeKind::Comb)), w));
  std::cout << "comb shift on a window with " << comb->window().size() << " vertices\n";
  show("0 -> e_0", chain_zero_to_e0<Rational>(delta, comb).chain);
  show("e_0 -> 0", chain_e0_to_zero_comb<Rational>(delta, comb).chain);
  show("e_0 -> e_0", round_trip_chain<Rational>(0, delta, comb));

  for (auto [k, j] : {std::pair{3, 1}, std::pair{4, 4}}) {
    auto v = noncr_bound_comb(SeqVector<Rational>::unit(VertexId::branch(k, j)), w);
    std::cout << "e_" << VertexId::branch(k, j).str() << " is not chain recurrent: no delta-chain back for delta <= "
              << *v.bound << "\n";
  }

  auto greq = need(OpFamily::GridT);
  auto grid = share(build_grid_T(build_grid_tree(greq.minimal(TreeKind::Grid)), w));
  auto step2 = chain_e0_to_zero_grid<Rational>(delta, grid);
  show("grid e_0 -> 0", step2.chain);
  std::cout << "  f_" << *step2.recipe.grid_n << " = " << to_string(step2.chain.vectors[*step2.recipe.grid_n]) << "\n";
  auto gv = noncr_bound_grid(SeqVector<Rational>::unit(VertexId::branch(2, 1)), w);
  std::cout << "grid e_(-2,1): bound " << *gv.bound << " (" << gv.evidence << ")\n";

  auto line = ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, mu1);
  auto rep = classify_classical(line, SeminormFamily<Rational>::banach(Lp{2.0}));
  std::cout << "restriction to the line span: " << to_string(rep.verdict.kind) << ", bound " << *rep.verdict.bound
            << ", oracle infimum over m <= 60 ~ " << real_to_double(*rep.oracle_infimum) << "\n";
}
