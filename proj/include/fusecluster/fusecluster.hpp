#pragma once

#include "fusecluster/admm.hpp"
#include "fusecluster/caf_hfcm.hpp"
#include "fusecluster/dataset.hpp"
#include "fusecluster/error.hpp"
#include "fusecluster/fuzzy.hpp"
#include "fusecluster/metrics.hpp"
#include "fusecluster/random.hpp"
#include "fusecluster/serialize.hpp"
#include "fusecluster/suite.hpp"
