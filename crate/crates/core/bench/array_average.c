#include <mpi.h>
#include <stdio.h>
#define N 1000
int main(int argc, char *argv[])
{
    int rank, size, i;
    double a[N], local = 0.0, total = 0.0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (i = 0; i < N; i++)
    {
        a[i] = 0.5 * i + 1.0;
    }
    for (i = rank; i < N; i += size)
    {
        local += a[i];
    }
    MPI_Reduce(&local, &total, 1, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("average = %.10f\n", total / N);
    }
    MPI_Finalize();
    return 0;
}
