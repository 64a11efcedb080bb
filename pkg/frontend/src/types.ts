/** Shapes of the analysis outputs this layer consumes. */

export interface ResultsConfig {
  p_grid: number[];
  n_replicates: number;
  n_networks: number;
  omega: number;
  alpha: number;
  estimator: string;
  variant: string;
}

export interface NaiveEstimate {
  value: number;
  std_error: number;
  ci: [number, number];
  method: string;
  n_units: number;
}

export interface PooledRecord {
  p_bar: number;
  mean: number;
  between_var: number;
  within_var: number;
  total_var: number;
  ci: [number, number];
}

export interface RawBlock {
  p_bar: number;
  values: number[];
  std_errors: number[];
}

export interface DiagnosticsDocument {
  observed_density: number;
  imputed_densities?: number[];
  sparser_than_observed?: boolean[];
  all_sparser?: boolean;
}

export interface ResultsDocument {
  schema_version: number;
  config: ResultsConfig;
  naive: NaiveEstimate;
  pooled: PooledRecord[];
  raw?: RawBlock[];
  imputation_diagnostics?: DiagnosticsDocument;
  provenance: { master_seed: number; created_at: string };
}

/** One row of the flat per-estimate CSV. */
export interface RawEstimateRow {
  pBar: number;
  network: number;
  replicate: number;
  estimate: number;
  stdError: number;
}
