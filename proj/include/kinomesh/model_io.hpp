#pragma once

#include <iosfwd>
#include <string>

#include "kinomesh/milp_model.hpp"

namespace kinomesh {

enum class ModelFormat { Lp, Mps };

/// Parses "lp"/"mps" (case-insensitive). Throws ValidationError otherwise.
ModelFormat parse_model_format(const std::string& text);

/// CPLEX-LP or MPS text. Every column appears in the bounds section in
/// index order, which fixes the column order on import. Numbers use 17
/// significant digits, so export -> import -> export is byte-identical.
///
/// The MPS writer keeps the fixed-column layout but lets names longer than
/// eight characters run past their field; the reader splits on whitespace.
std::string export_model(const MilpModel& model, ModelFormat format);
void export_model(std::ostream& out, const MilpModel& model, ModelFormat format);

/// Reads the subset produced by export_model: minimization, <=/>=/= rows,
/// bounds, binaries. Unknown sections raise ParseError with the line.
/// Family tags and the layout are recovered from the names.
MilpModel import_model(std::istream& in, ModelFormat format);
MilpModel import_model(const std::string& text, ModelFormat format);

}  // namespace kinomesh
