#pragma once

#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"
#include "riskdom/piecewise.hpp"
#include "riskdom/background_risk.hpp"
#include "riskdom/dominance.hpp"
#include "riskdom/thresholds.hpp"
#include "riskdom/cpt.hpp"
#include "riskdom/two_gamble.hpp"
#include "riskdom/verify.hpp"
#include "riskdom/json_io.hpp"
