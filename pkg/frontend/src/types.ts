/** Payload shapes of the /api/v1 JSON contract. */

export interface DatasetMeta {
  id: string;
  taskKind: string;
  sampleCount: number;
  sha256: string;
  hasTrainStats: boolean;
  createdAt: string;
}

export interface SystemMeta {
  id: string;
  name: string;
  taskKind: string;
  datasetId: string;
  overallValue: number | null;
  metricName: string;
  kind: "submitted" | "combined";
  createdAt: string;
  submitter?: string | null;
  memberIds?: string[];
}

export interface BucketPerformance {
  key: string;
  n: number;
  value: number | null;
  ciLow: number | null;
  ciHigh: number | null;
  components: Record<string, number>;
}

export interface AnalysisReport {
  systemIds: string[];
  systemNames: string[];
  datasetId: string;
  taskKind: string;
  metricName: string;
  metricVariant: string;
  overall: BucketPerformance;
  perAttribute: Record<string, BucketPerformance[]>;
  bootstrap: Record<string, unknown>;
  generatedAt: string;
  engineVersion: string;
  members?: MemberOverall[];
  combinedId?: string;
}

export interface MemberOverall {
  systemId: string;
  name: string;
  value: number;
}

export interface PairBucketGap {
  key: string;
  n: number;
  valueA: number | null;
  valueB: number | null;
  gap: number | null;
}

export interface PairReport {
  systemA: string;
  systemB: string;
  systemNames: [string, string];
  datasetId: string;
  taskKind: string;
  metricName: string;
  overallA: number | null;
  overallB: number | null;
  overallGap: number | null;
  perAttribute: Record<string, PairBucketGap[]>;
}

export interface BiasProfile {
  taskKind: string;
  datasetIds: string[];
  perAttribute: Record<
    string,
    {
      kind: "continuous" | "categorical";
      perDataset: Record<
        string,
        {
          mean?: number | null;
          n: number;
          distribution?: Record<string, number>;
          counts?: Record<string, number>;
        }
      >;
    }
  >;
}

export interface ErrorCase {
  sampleId: number;
  unitKind: "sample" | "span";
  start: number | null;
  end: number | null;
  errorKind: "wrong-label" | "missed" | "spurious";
  gold: string;
  predicted: Record<string, string>;
  context: string;
}

export interface ErrorPage {
  items: ErrorCase[];
  page: number;
  pageSize: number;
  total: number;
}

export interface CalibrationBin {
  low: number;
  high: number;
  n: number;
  meanConfidence: number | null;
  accuracy: number | null;
}

export interface CalibrationReport {
  systemIds: string[];
  systemNames: string[];
  datasetId: string;
  taskKind: string;
  bins: CalibrationBin[];
  confidenceHistogram: number[];
  ece: number;
  n: number;
}
