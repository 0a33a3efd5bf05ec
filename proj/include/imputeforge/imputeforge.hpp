#pragma once

#include "imputeforge/association.hpp"
#include "imputeforge/backend.hpp"
#include "imputeforge/config.hpp"
#include "imputeforge/csv.hpp"
#include "imputeforge/dataset.hpp"
#include "imputeforge/errors.hpp"
#include "imputeforge/eval.hpp"
#include "imputeforge/orchestrator.hpp"
#include "imputeforge/prompt.hpp"
#include "imputeforge/rng.hpp"
#include "imputeforge/threshold.hpp"
#include "imputeforge/util.hpp"
