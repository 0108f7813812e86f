#pragma once

// Dataset CSV format: UTF-8, LF line endings, header f0,...,f{d-1},label.
// Label -1 marks an unlabeled point.

#include <iosfwd>
#include <string>

#include "jcpot/adaptation.hpp"
#include "jcpot/dataset.hpp"

namespace jcpot::harness {

// Throws kParse with the 1-based line number on a missing or malformed
// header, non-numeric cells and ragged rows.
LabeledDataset read_labeled_csv(std::istream& in);
LabeledDataset load_labeled_csv(const std::string& path);

// Values are written in shortest round-trip form, so reading the file back
// reproduces them exactly.
void write_labeled_csv(std::ostream& out, const LabeledDataset& data);
void save_labeled_csv(const std::string& path, const LabeledDataset& data);

// index,pred_label,score_c0,...,score_c{C-1}
void write_predictions_csv(std::ostream& out, const Prediction& prediction);

}  // namespace jcpot::harness
