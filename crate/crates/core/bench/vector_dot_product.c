#include <mpi.h>
#include <stdio.h>
#define N 600
int main(int argc, char *argv[])
{
    int rank, size, i, n = 0;
    double x[N], y[N], local = 0.0, dot = 0.0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    if (rank == 0)
    {
        n = N;
    }
    MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);
    for (i = 0; i < n; i++)
    {
        x[i] = 0.25 * i;
        y[i] = 3.0 - 0.01 * i;
    }
    for (i = rank; i < n; i += size)
    {
        local += x[i] * y[i];
    }
    MPI_Reduce(&local, &dot, 1, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("dot = %.10f\n", dot);
    }
    MPI_Finalize();
    return 0;
}
