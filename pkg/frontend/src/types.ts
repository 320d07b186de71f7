// Client-side mirrors of the API payloads. Every number rendered in the UI
// comes straight out of these objects; nothing is recomputed client-side.

export interface LeaderboardRow {
    model_id: string;
    mean_score: number;
    ci_low: number;
    ci_high: number;
    runs: number;
    avg_cost: string | null;
    flags: string[];
}

export interface LeaderboardPayload {
    per_benchmark: Record<string, LeaderboardRow[]>;
    expected_performance: Record<string, number>;
    expected_cost: Record<string, string>;
    watermark: number;
    notices: string[];
}

export interface BenchmarkSpec {
    benchmark_id: string;
    name: string;
    category: string;
    family_tag: string;
    size: number;
    grading_pipeline: string;
    tool_policy: string | null;
    runs_per_model: number;
    date_window: [string, string] | null;
    deprecated: boolean;
    cost_excluded: boolean;
}

export interface BenchmarkPayload {
    spec: BenchmarkSpec;
    rows: LeaderboardRow[];
}

export interface TranscriptMessage {
    role: string;
    content: string;
    tool_call: unknown | null;
    tool_result: unknown | null;
}

export interface RunRecord {
    problem_id: string;
    benchmark_id: string;
    model_id: string;
    run_index: number;
    transcript: TranscriptMessage[];
    final_text: string | null;
    usage: { input_tokens: number; output_tokens: number };
    cost: string | null;
    status: string;
    attempts: number;
    tool_calls: number;
    extraction_method: string | null;
    extracted_answer: string | null;
    rounds_used: number;
}

export interface ProblemRunsPayload {
    runs: RunRecord[];
}

export interface ModelPagePayload {
    model_id: string;
    benchmarks: Record<string, LeaderboardRow>;
    expected_performance: number | null;
    expected_rank: number | null;
    expected_cost: string | null;
}

export interface CompareDelta {
    a: LeaderboardRow;
    b: LeaderboardRow;
    score_delta: number;
    cost_delta: string | null;
}

export interface ComparePayload {
    a: string;
    b: string;
    benchmarks: Record<string, CompareDelta>;
}

export interface StageHistoryEntry {
    stage: string;
    outcome: string;
    rationale: string;
    timestamp: string;
}

export interface ReviewCandidate {
    candidate_id: string;
    paper_id: string;
    question: string;
    kind: string;
    state: string;
    stage_history: StageHistoryEntry[];
}

export interface ReviewQueuePayload {
    candidates: ReviewCandidate[];
}

export interface GradeRecord {
    problem_id: string;
    model_id: string;
    run_index: number;
    score: number;
    max_score: number;
    method: string;
    judge_transcripts: unknown[];
    flags: string[];
    final: boolean;
    grade_id: string;
    supersedes: string | null;
    audit_note: string | null;
}

export interface GradeQueuePayload {
    grades: GradeRecord[];
}

export interface ReviewResult {
    candidate_id: string;
    state: string;
}

export interface GradeReviewResult {
    grade_id: string;
    score: number;
    supersedes: string;
    final: boolean;
}
