#pragma once

#include "gather/annotate.hpp"
#include "gather/config.hpp"
#include "gather/error.hpp"
#include "gather/eval_harness.hpp"
#include "gather/graph_store.hpp"
#include "gather/grounding.hpp"
#include "gather/http_client.hpp"
#include "gather/log.hpp"
#include "gather/obo_ontology.hpp"
#include "gather/retrieval.hpp"
#include "gather/scoring.hpp"
#include "gather/synth_kg.hpp"
#include "gather/traversal.hpp"
