// Action layer between the view and the API client. Optimistic updates
// are deliberately absent: every state change awaits the service reply,
// and a refused transition (409) surfaces as a notice without touching
// the last known session state.

import { ApiError, WorkbenchApi } from "./api.js";
import {
  WorkbenchState,
  currentCandidate,
  diffTrees,
  initialState,
} from "./state.js";
import type { PromptSpecData } from "./types.js";

export class WorkbenchController {
  state: WorkbenchState = initialState();

  constructor(private api: WorkbenchApi,
              private onChange: (state: WorkbenchState) => void = () => {}) {}

  private commit(patch: Partial<WorkbenchState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError) {
        if (error.code === "unusable_branch") {
          this.commit({
            errorPanel: {
              message: error.message,
              nodeIds: (error.detail.node_ids as string[]) ?? [],
            },
          });
          return;
        }
        // illegal transition or validation problem: non-destructive notice
        this.commit({ notice: `${error.code}: ${error.message}` });
        return;
      }
      throw error;
    }
  }

  async startSession(spec: PromptSpecData): Promise<void> {
    await this.guarded(async () => {
      const session = await this.api.startSession(spec);
      this.commit({ ...initialState(), session });
    });
  }

  async loadSession(id: string): Promise<void> {
    await this.guarded(async () => {
      const session = await this.api.getSession(id);
      this.commit({ ...initialState(), session });
    });
  }

  async sendInsertPrompt(): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      this.commit({ session: await this.api.sendInsertPrompt(id), notice: null });
    });
  }

  async requestBranch(component?: string): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      const session = await this.api.requestBranch(id, "generalized", component);
      this.commit({ session, selectedCandidate: -1, notice: null });
    });
  }

  async mergeCandidates(): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      const session = await this.api.mergeCandidates(id);
      this.commit({ session, selectedCandidate: -1, notice: null });
    });
  }

  async applyStyle(style: Record<string, Record<string, string>>): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      const session = await this.api.applyCosmetics(id, style);
      this.commit({ session, selectedCandidate: -1, notice: null });
    });
  }

  /** Refinement loop; empty feedback is blocked client-side, no request. */
  async submitRefinement(feedback: string): Promise<boolean> {
    const id = this.requireSession();
    if (!feedback.trim()) {
      this.commit({ notice: "feedback text is required for a refinement" });
      return false;
    }
    const before = currentCandidate(this.state)?.tree ?? null;
    let applied = false;
    await this.guarded(async () => {
      const session = await this.api.validate(id, "refine", feedback);
      const after = session.candidates.length > 0
        ? session.candidates[session.candidates.length - 1].tree
        : null;
      this.commit({
        session,
        selectedCandidate: -1,
        notice: null,
        lastDiff: diffTrees(before, after),
      });
      applied = true;
    });
    return applied;
  }

  async accept(): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      const session = await this.api.validate(id, "accept");
      this.commit({ session, notice: null });
    });
  }

  async launchExperiment(goalId: string, leafHint: string | undefined,
                         initialCloudState: unknown, detector: unknown,
                         defaults?: unknown): Promise<void> {
    const id = this.requireSession();
    await this.guarded(async () => {
      const dot = await this.api.fetchTreeDot(id);
      const experiment = await this.api.compileExperiment(dot, goalId, leafHint, defaults);
      const report = await this.api.runExperiment(experiment, initialCloudState, detector);
      this.commit({ experimentReport: report, errorPanel: null, notice: null });
    });
  }

  selectCandidate(index: number): void {
    this.commit({ selectedCandidate: index });
  }

  dismissNotice(): void {
    this.commit({ notice: null });
  }

  private requireSession(): string {
    const session = this.state.session;
    if (!session) throw new Error("no active session");
    return session.id;
  }
}
