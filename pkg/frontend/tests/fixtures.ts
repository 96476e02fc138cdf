import type { GymDocument } from "../src/types.js";

/** Bakery gym document, exported verbatim from the catalog seed. */
export const BAKERY: GymDocument = {
  "name": "bakery",
  "description": "Inventory-driven recipe planning over a 20-step day.",
  "state_vars": [
    {
      "name": "flour",
      "kind": "integer",
      "lower": 0,
      "upper": 12
    },
    {
      "name": "sugar",
      "kind": "integer",
      "lower": 0,
      "upper": 12
    },
    {
      "name": "bread",
      "kind": "integer",
      "lower": 0,
      "upper": 6
    },
    {
      "name": "cake",
      "kind": "integer",
      "lower": 0,
      "upper": 6
    },
    {
      "name": "output_value",
      "kind": "integer",
      "lower": 0,
      "upper": 8
    }
  ],
  "actions": [
    {
      "name": "bake_bread",
      "params": []
    },
    {
      "name": "bake_cake",
      "params": []
    },
    {
      "name": "buy_supplies",
      "params": []
    }
  ],
  "transition": [
    {
      "action": "bake_bread",
      "assign": {
        "flour": "flour - if(flour >= 2, 2, 0)",
        "bread": "bread + if(flour >= 2, 1, 0)",
        "output_value": "if(flour >= 2, 3, 0)"
      }
    },
    {
      "action": "bake_cake",
      "assign": {
        "flour": "flour - if(flour >= 1 and sugar >= 2, 1, 0)",
        "sugar": "sugar - if(flour >= 1 and sugar >= 2, 2, 0)",
        "cake": "cake + if(flour >= 1 and sugar >= 2, 1, 0)",
        "output_value": "if(flour >= 1 and sugar >= 2, 5, 0)"
      }
    },
    {
      "action": "buy_supplies",
      "assign": {
        "flour": "flour + 4",
        "sugar": "sugar + 2",
        "output_value": "0"
      }
    }
  ],
  "reward_metrics": [
    {
      "name": "revenue",
      "weight": 1.0,
      "expression": "output_value"
    },
    {
      "name": "labor_cost",
      "weight": 1.0,
      "expression": "-1"
    }
  ],
  "termination": "step >= 20",
  "max_steps": 20,
  "initial_state": {
    "flour": 6,
    "sugar": 4,
    "bread": 0,
    "cake": 0,
    "output_value": 0
  }
};
