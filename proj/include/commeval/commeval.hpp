#pragma once

#include "commeval/bias.hpp"
#include "commeval/consensus.hpp"
#include "commeval/detection/suite.hpp"
#include "commeval/error.hpp"
#include "commeval/functional.hpp"
#include "commeval/graph.hpp"
#include "commeval/pipeline.hpp"
#include "commeval/report.hpp"
#include "commeval/structural.hpp"
#include "commeval/synth.hpp"
