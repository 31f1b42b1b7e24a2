#include "logic/sweep.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "logic/semantics.hpp"

namespace logic {

namespace {

CellStatus eval_cell(const Ast& sentence, const Structure& structure,
                     long long limit) {
  try {
    Budget budget(limit);
    return sat_sentence(structure, sentence, budget) ? CellStatus::True
                                                     : CellStatus::False;
  } catch (const BudgetExceeded&) {
    return CellStatus::Error;
  } catch (const std::runtime_error&) {
    return CellStatus::Error;
  }
}

}  // namespace

SweepResult truth_sweep_serial(const std::vector<Ast>& sentences,
                               const std::vector<Structure>& structures,
                               const SweepOptions& opts) {
  SweepResult out;
  out.rows = sentences.size();
  out.cols = structures.size();
  out.cells.resize(out.rows * out.cols, CellStatus::Error);
  for (size_t r = 0; r < out.rows; ++r)
    for (size_t c = 0; c < out.cols; ++c)
      out.cells[r * out.cols + c] =
          eval_cell(sentences[r], structures[c], opts.budget_per_cell);
  return out;
}

SweepResult truth_sweep(const std::vector<Ast>& sentences,
                        const std::vector<Structure>& structures,
                        const SweepOptions& opts) {
  SweepResult out;
  out.rows = sentences.size();
  out.cols = structures.size();
  out.cells.resize(out.rows * out.cols, CellStatus::Error);
  const long long total = static_cast<long long>(out.cells.size());
#ifdef _OPENMP
  if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < total; ++i) {
    size_t r = static_cast<size_t>(i) / out.cols;
    size_t c = static_cast<size_t>(i) % out.cols;
    out.cells[i] = eval_cell(sentences[r], structures[c], opts.budget_per_cell);
  }
  return out;
}

std::vector<size_t> diff_cells(const SweepResult& a, const SweepResult& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("sweep shapes differ");
  std::vector<size_t> out;
  for (size_t i = 0; i < a.cells.size(); ++i)
    if (a.cells[i] != b.cells[i]) out.push_back(i);
  return out;
}

}  // namespace logic
