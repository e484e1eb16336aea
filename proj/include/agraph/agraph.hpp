#pragma once

#include "agraph/error.hpp"
#include "agraph/rng.hpp"
#include "agraph/model.hpp"
#include "agraph/graph.hpp"
#include "agraph/graphgen.hpp"
#include "agraph/plans.hpp"
#include "agraph/risk.hpp"
#include "agraph/search.hpp"
#include "agraph/scenario.hpp"
#include "agraph/io.hpp"
#include "agraph/report.hpp"
