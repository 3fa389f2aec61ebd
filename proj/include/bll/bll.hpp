#pragma once

// Umbrella header: dense tensor algebra, N-qudit states, multi-copy source
// operator dilations, tensor-positivity certification, closed-form locality
// and separability thresholds, and finite-outcome Bell scenario checks.

#include "bll/bellcheck.hpp"
#include "bll/bounds.hpp"
#include "bll/dilation.hpp"
#include "bll/io_json.hpp"
#include "bll/states.hpp"
#include "bll/tensor.hpp"
#include "bll/tpcert.hpp"
