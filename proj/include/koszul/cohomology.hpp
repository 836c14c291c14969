#pragma once

#include <map>
#include <string>
#include <vector>

#include "koszul/linalg.hpp"
#include "koszul/model.hpp"
#include "koszul/operators.hpp"

namespace koszul {

/// Table kernels fan out over independent bidegrees/antidiagonals; Serial is
/// the reference path the tests compare the OpenMP path against.
enum class Exec { Serial, Parallel };

enum class TableKind { Dolbeault, DelPi, KB, BC, Aeppli, LP, SSPage };
std::string table_kind_name(TableKind k);

struct CohomologyTable {
  TableKind kind = TableKind::Dolbeault;
  int page = -1;  // SSPage only
  std::map<std::pair<int, int>, int> bigraded;  // (p,q) or (s,t) -> dim
  std::map<int, int> graded;                    // k -> dim
  std::map<std::pair<int, int>, std::vector<std::string>> bigraded_reps;
  std::map<int, std::vector<std::string>> graded_reps;
  std::vector<std::string> notes;  // flagged anomalies, e.g. broken duality

  int at(int a, int b) const {
    auto it = bigraded.find({a, b});
    return it == bigraded.end() ? 0 : it->second;
  }
  int at(int k) const {
    auto it = graded.find(k);
    return it == graded.end() ? 0 : it->second;
  }
};

struct HodgeDiamond {
  int n = 0;
  std::map<std::pair<int, int>, int> h;
  int at(int p, int q) const {
    auto it = h.find({p, q});
    return it == h.end() ? 0 : it->second;
  }
};

// ---------------------------------------------------------------------------
// Total complexes of the bigraded model.  KB grades forms by k = n - p + q so
// that both differentials del_pi and dbar raise k by one; DeRham grades forms
// by k = p + q with differential del + dbar; LP grades polyvectors by k = s + t
// with differential b_pi + dbar.

enum class TotalGrading { KB, DeRham, LP };

struct TotalSlice {
  int k = 0;
  std::vector<std::pair<int, int>> blocks;  // lex-ordered bidegrees
  std::vector<int> offsets;
  int dim = 0;

  int block_index(int p, int q) const {
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i] == std::make_pair(p, q)) return static_cast<int>(i);
    return -1;
  }
  int offset(int p, int q) const {
    int b = block_index(p, q);
    return b < 0 ? -1 : offsets[b];
  }
};

int total_degree(const Model& m, TotalGrading g, int p, int q);
int max_total_degree(const Model& m, TotalGrading g);
TotalSlice total_slice(const Model& m, TotalGrading g, int k);
SparseMatrix total_differential(const Model& m, TotalGrading g, int k);

SparseVector embed_in_slice(const TotalSlice& s, int p, int q, const SparseVector& v);
SubspaceBasis block_coordinates(const TotalSlice& s, int p, int q);
/// Inverse of embed for vectors supported on one block.
SparseVector restrict_to_block(const TotalSlice& s, int p, int q, const SparseVector& v);

/// Pretty-print a slice vector as a sum of labelled monomials.
std::string slice_vector_str(const Model& m, const TotalSlice& s, const SparseVector& v,
                             bool poly = false);

// ---------------------------------------------------------------------------
// Tables

CohomologyTable dolbeault(const Model& m, Exec exec = Exec::Parallel, bool reps = false);
CohomologyTable delpi_cohomology(const Model& m, Exec exec = Exec::Parallel,
                                 bool reps = false);
CohomologyTable kb_homology(const Model& m, Exec exec = Exec::Parallel, bool reps = false);
CohomologyTable lp_cohomology(const Model& m, Exec exec = Exec::Parallel, bool reps = false);
CohomologyTable bott_chern(const Model& m, Exec exec = Exec::Parallel, bool reps = false);
CohomologyTable aeppli(const Model& m, Exec exec = Exec::Parallel, bool reps = false);

/// Page r of the spectral sequence of the column filtration of the KB double
/// complex, indexed by (s,t) with E_1^{s,t} the Dolbeault dimension h^{n-s,t}.
CohomologyTable ss_page(const Model& m, int r, Exec exec = Exec::Parallel);
/// Stable page, computed directly from the filtration of the total cohomology.
CohomologyTable ss_infinity(const Model& m, Exec exec = Exec::Parallel);

HodgeDiamond hodge_diamond(const Model& m, Exec exec = Exec::Parallel);

/// Formula mode: no model involved, only a Hodge diamond.
CohomologyTable kb_from_hodge(const HodgeDiamond& h, int n);
HodgeDiamond kunneth(const HodgeDiamond& a, const HodgeDiamond& b);

}  // namespace koszul
