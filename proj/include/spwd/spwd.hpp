#pragma once

#include "spwd/common.hpp"
#include "spwd/decompose.hpp"
#include "spwd/experiments.hpp"
#include "spwd/generators.hpp"
#include "spwd/instance.hpp"
#include "spwd/merge.hpp"
#include "spwd/model.hpp"
#include "spwd/pipeline.hpp"
#include "spwd/solver.hpp"
#include "spwd/sp_tree.hpp"
#include "spwd/ttsp_graph.hpp"
#include "spwd/ttsp_mapping.hpp"
#include "spwd/wfcommons.hpp"
#include "spwd/workflow.hpp"
