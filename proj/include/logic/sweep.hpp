#pragma once

#include "logic/ast.hpp"
#include "logic/model.hpp"

namespace logic {

// Batch truth evaluation of a sentence list against a structure list: the
// workhorse behind differential testing and the preservation sweeps. Cells
// are independent, so the parallel kernel splits them across OpenMP threads;
// the serial kernel is the reference the parallel one is tested against.

enum class CellStatus { False = 0, True = 1, Error = 2 };

struct SweepOptions {
  long long budget_per_cell = Budget::kDefaultLimit;
  int jobs = 0;  // 0: library default thread count
};

struct SweepResult {
  size_t rows = 0;  // sentences
  size_t cols = 0;  // structures
  std::vector<CellStatus> cells;  // row-major

  CellStatus at(size_t row, size_t col) const { return cells[row * cols + col]; }
};

SweepResult truth_sweep_serial(const std::vector<Ast>& sentences,
                               const std::vector<Structure>& structures,
                               const SweepOptions& opts = {});

SweepResult truth_sweep(const std::vector<Ast>& sentences,
                        const std::vector<Structure>& structures,
                        const SweepOptions& opts = {});

// Indices (row-major) where the two results disagree; shapes must match.
std::vector<size_t> diff_cells(const SweepResult& a, const SweepResult& b);

}  // namespace logic
